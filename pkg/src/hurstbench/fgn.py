"""Exact second-order self-similar (fGn) model mathematics.

Autocovariance, spectral density, block aggregation and empirical
correlation diagnostics for a fractional Gaussian noise model with
Hurst exponent ``h`` and variance ``sigma2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError

# Image terms kept in the spectral sum before switching to the integral
# tail; 200 keeps the evaluation error below 1e-6 over the whole H range.
DEFAULT_SPECTRAL_TRUNCATION = 200

# Asymptotic ACF fits are contaminated by small lags; start at 10 by default.
DEFAULT_TAIL_KMIN = 10


@dataclass(frozen=True)
class FgnModel:
    """Fractional Gaussian noise parameters: Hurst exponent and variance."""

    h: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ValueError(f"Hurst exponent must lie in (0, 1), got {self.h}")
        if not self.sigma2 > 0.0:
            raise ValueError(f"variance must be positive, got {self.sigma2}")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Finite real-valued sample sequence, optionally on a uniform time base.

    ``origin`` and ``step`` are seconds; both are None for index-only series.
    """

    values: np.ndarray
    origin: float | None = None
    step: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("series must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains NaN or infinite samples")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive when given")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def as_series(series) -> TimeSeries:
    """Coerce an array-like into a TimeSeries (no-op for TimeSeries input)."""
    if isinstance(series, TimeSeries):
        return series
    return TimeSeries(np.asarray(series, dtype=float))


@dataclass(frozen=True, eq=False)
class AutocovarianceCurve:
    """Autocovariance values per lag, with an optional fitted hyperbolic tail."""

    lags: np.ndarray
    values: np.ndarray
    tail_beta: float | None = None
    tail_c: float | None = None

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if lags.shape != values.shape:
            raise ValueError("lags and values must have matching shapes")
        if lags.size == 0 or lags[0] != 0 or np.any(np.diff(lags) <= 0):
            raise ValueError("lags must increase strictly from 0")
        if self.tail_c is not None and not self.tail_c > 0:
            raise ValueError("tail constant must be positive")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """fGn spectral density sampled on angular frequencies in (0, pi]."""

    frequencies: np.ndarray
    density: np.ndarray
    truncation: int = DEFAULT_SPECTRAL_TRUNCATION

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        if freqs.shape != dens.shape:
            raise ValueError("frequencies and density must have matching shapes")
        if np.any(freqs <= 0.0) or np.any(freqs > np.pi):
            raise ValueError("frequencies must lie in (0, pi]")
        if np.any(dens <= 0.0):
            raise ValueError("density must be strictly positive")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "density", dens)


def fgn_autocovariance(model: FgnModel, k):
    """Autocovariance of fGn at integer lag(s) k >= 0.

    rho(k) = sigma2/2 * [(k+1)^(2H) - 2 k^(2H) + (k-1)^(2H)] for k >= 1,
    and rho(0) = sigma2.
    """
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise ValueError("lag must be nonnegative")
    kf = np.abs(k_arr.astype(float))
    two_h = 2.0 * model.h
    rho = 0.5 * model.sigma2 * (
        (kf + 1.0) ** two_h - 2.0 * kf ** two_h + np.abs(kf - 1.0) ** two_h
    )
    rho = np.where(k_arr == 0, model.sigma2, rho)
    return float(rho) if np.isscalar(k) or k_arr.ndim == 0 else rho


def _image_sum(lam: np.ndarray, h: float, truncation: int) -> np.ndarray:
    """sum_{j=-K..K} |2 pi j + lam|^(-2H-1) plus the integral tail beyond K."""
    a = 2.0 * h + 1.0
    j = np.arange(1, truncation + 1)
    lam_col = lam[..., np.newaxis]
    total = np.abs(lam) ** (-a)
    total = total + np.sum(
        (2.0 * np.pi * j + lam_col) ** (-a) + (2.0 * np.pi * j - lam_col) ** (-a),
        axis=-1,
    )
    # Midpoint-rule tail: sum_{j>K} g(j) ~ integral_{K+1/2}^inf g(x) dx.
    edge = 2.0 * np.pi * (truncation + 0.5)
    tail = ((edge + lam) ** (1.0 - a) + (edge - lam) ** (1.0 - a)) / (
        2.0 * np.pi * (a - 1.0)
    )
    return total + tail


def fgn_spectral_density(
    model: FgnModel, lam, truncation: int = DEFAULT_SPECTRAL_TRUNCATION
):
    """fGn spectral density f(lam; H) for angular frequency lam in (0, pi].

    Normalized so the integral of f over (-pi, pi) equals sigma2; the
    white-noise case H = 0.5 gives the flat density sigma2 / (2 pi).
    """
    if truncation < 1:
        raise ValueError("truncation must be a positive integer")
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0.0) or np.any(lam_arr > np.pi):
        raise ValueError("frequency must lie in (0, pi]")
    scale = (
        model.sigma2
        / (2.0 * np.pi)
        * math.sin(math.pi * model.h)
        * math.gamma(2.0 * model.h + 1.0)
    )
    dens = 2.0 * scale * (1.0 - np.cos(lam_arr)) * _image_sum(lam_arr, model.h, truncation)
    return float(dens) if np.isscalar(lam) or lam_arr.ndim == 0 else dens


def fgn_spectral_model(
    model: FgnModel, frequencies, truncation: int = DEFAULT_SPECTRAL_TRUNCATION
) -> SpectralModel:
    """Evaluate the fGn density on a frequency grid as a SpectralModel."""
    freqs = np.asarray(frequencies, dtype=float)
    return SpectralModel(
        frequencies=freqs,
        density=fgn_spectral_density(model, freqs, truncation),
        truncation=truncation,
    )


def aggregate_blocks(series, m: int) -> TimeSeries:
    """Block-mean aggregation: entry i is the mean of samples [i*m, (i+1)*m).

    Trailing samples that do not fill a block are dropped.
    """
    ts = as_series(series)
    if m < 1:
        raise ValueError("block size must be a positive integer")
    n = len(ts)
    if m > n:
        raise ValueError(f"block size {m} exceeds series length {n}")
    blocks = n // m
    values = ts.values[: blocks * m].reshape(blocks, m).mean(axis=1)
    step = ts.step * m if ts.step is not None else None
    return TimeSeries(values, origin=ts.origin, step=step)


def empirical_autocovariance(series, max_lag: int) -> AutocovarianceCurve:
    """Biased sample autocovariance about the sample mean.

    rho_hat(k) = (1/N) sum_t (x_t - xbar)(x_{t+k} - xbar); lag 0 is the
    biased sample variance.  A constant series yields an all-zero curve.
    """
    ts = as_series(series)
    n = len(ts)
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    if max_lag >= n:
        raise ValueError(f"max_lag {max_lag} must be smaller than length {n}")
    y = ts.values - ts.values.mean()
    values = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        values[k] = np.dot(y[: n - k], y[k:]) / n
    return AutocovarianceCurve(lags=np.arange(max_lag + 1), values=values)


def acf_tail_fit(
    curve: AutocovarianceCurve, k_min: int = DEFAULT_TAIL_KMIN
) -> tuple[float, float]:
    """Fit the hyperbolic tail rho(k) ~ c * k^(-beta) over lags >= k_min.

    Least squares on log rho vs log k; returns (beta, c) with beta = -slope.
    For fGn with 0.5 < H < 1, beta is close to 2 - 2H.
    """
    mask = curve.lags >= k_min
    lags = curve.lags[mask]
    vals = curve.values[mask]
    if np.any(vals <= 0.0):
        raise EstimationError(
            "autocovariance is not strictly positive beyond k_min; "
            "no hyperbolic decay to fit"
        )
    if lags.size < 5:
        raise ValueError("need at least 5 positive tail values to fit")
    slope, intercept = np.polyfit(np.log(lags.astype(float)), np.log(vals), 1)
    return -float(slope), float(np.exp(intercept))
