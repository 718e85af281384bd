"""Orthonormal discrete wavelet pyramid and per-octave detail variances.

Periodic (circular) boundary handling keeps the coefficient count at each
octave an exact halving of the previous one, which in turn keeps the
variance-of-log correction and regression weights simple functions of the
counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, polygamma

from .fgn import as_series

LN2 = float(np.log(2.0))

# Orthonormal 6-tap Daubechies lowpass (3 vanishing moments in the highpass),
# from spectral factorization of 1 + 3y + 6y^2; exact to double precision.
_DB3_LOWPASS = np.array(
    [
        0.3326705529500826159985,
        0.8068915093110925764945,
        0.4598775021184915700952,
        -0.1350110200102545886964,
        -0.08544127388202666169282,
        0.03522629188570953660274,
    ]
)
_HAAR_LOWPASS = np.array([np.sqrt(0.5), np.sqrt(0.5)])

FILTERS = {"db3": _DB3_LOWPASS, "haar": _HAAR_LOWPASS}

MIN_COEFFS_PER_LEVEL = 4


def _quadrature_mirror(lowpass: np.ndarray) -> np.ndarray:
    signs = np.where(np.arange(lowpass.size) % 2 == 0, 1.0, -1.0)
    return signs * lowpass[::-1]


def pyramid_details(values: np.ndarray, max_level: int | None = None, wavelet: str = "db3"):
    """Detail coefficient arrays d_1..d_J plus the final approximation.

    Circular convolution with stride-2 downsampling; an odd-length stage
    drops its last sample first so every stage stays even.
    """
    try:
        lowpass = FILTERS[wavelet]
    except KeyError:
        raise ValueError(f"unknown wavelet {wavelet!r}; options: {sorted(FILTERS)}")
    highpass = _quadrature_mirror(lowpass)
    taps = np.arange(lowpass.size)
    approx = np.asarray(values, dtype=float)
    details: list[np.ndarray] = []
    while max_level is None or len(details) < max_level:
        usable = approx.size - (approx.size % 2)
        if usable < 2:
            if max_level is not None:
                raise ValueError(
                    f"series exhausted at octave {len(details) + 1} of {max_level}"
                )
            break
        if max_level is None and usable // 2 < MIN_COEFFS_PER_LEVEL:
            break
        stage = approx[:usable]
        idx = (2 * np.arange(usable // 2)[:, None] + taps[None, :]) % usable
        windows = stage[idx]
        details.append(windows @ highpass)
        approx = windows @ lowpass
    return details, approx


@dataclass(frozen=True, eq=False)
class LogscaleDiagram:
    """Per-octave log2 detail variances with counts and regression weights.

    log_variances are bias-corrected: E[log2 mean(d^2)] understates
    log2 E[d^2] by g(n) = digamma(n/2)/ln 2 - log2(n/2) for n Gaussian
    coefficients, so g(n_j) is subtracted out.
    """

    levels: np.ndarray
    log_variances: np.ndarray
    counts: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for name in ("levels", "counts"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=int))
        for name in ("log_variances", "weights"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (
            self.levels.shape
            == self.log_variances.shape
            == self.counts.shape
            == self.weights.shape
        ):
            raise ValueError("diagram fields must have matching shapes")
        if np.any(self.weights <= 0.0):
            raise ValueError("regression weights must be positive")


def log_variance_bias(count: int) -> float:
    """g(n): expected downward bias of log2 of a mean of n squared Gaussians."""
    return float(digamma(count / 2.0) / LN2 - np.log2(count / 2.0))


def log_variance_var(count: int) -> float:
    """Variance of log2 of a mean of n squared Gaussians (trigamma / ln^2 2)."""
    return float(polygamma(1, count / 2.0) / LN2**2)


def dwt_detail_variances(
    series, max_level: int | None = None, wavelet: str = "db3"
) -> LogscaleDiagram:
    """Logscale diagram of a series: octaves 1..J with corrected log2 variances.

    J defaults to the deepest octave keeping at least 4 coefficients; asking
    for more is a level-range error.
    """
    values = as_series(series).values
    details, _ = pyramid_details(values, max_level=max_level, wavelet=wavelet)
    levels = np.arange(1, len(details) + 1)
    counts = np.array([d.size for d in details])
    if max_level is not None and np.any(counts < MIN_COEFFS_PER_LEVEL):
        raise ValueError(
            f"level range leaves fewer than {MIN_COEFFS_PER_LEVEL} coefficients"
        )
    mu = np.array([np.mean(d**2) for d in details])
    with np.errstate(divide="ignore"):
        raw_log = np.log2(mu)
    corrected = raw_log - np.array([log_variance_bias(c) for c in counts])
    weights = 1.0 / np.array([log_variance_var(c) for c in counts])
    return LogscaleDiagram(
        levels=levels, log_variances=corrected, counts=counts, weights=weights
    )
