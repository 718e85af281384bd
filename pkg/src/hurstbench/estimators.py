"""Hurst exponent estimators: Whittle, Abry-Veitch, periodogram and R/S.

All four are pure functions of the input series, scale- and shift-invariant,
and report a point estimate plus method diagnostics.  Estimates above 1 are
reported with a non-stationarity flag rather than clamped so that downstream
bias statistics stay honest.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .errors import DegenerateSeriesError, EstimationError
from .fgn import DEFAULT_SPECTRAL_TRUNCATION, as_series
from .wavelet import dwt_detail_variances

METHODS = ("whittle", "abry_veitch", "periodogram", "rs")

WHITTLE_BOUNDS = (0.01, 0.99)
WHITTLE_XTOL = 1e-6
WHITTLE_MAXITER = 200
DEFAULT_LOWFREQ_FRACTION = 0.10
DEFAULT_J1 = 3
DEFAULT_MIN_BLOCK = 8
RS_SIZES_PER_DECADE = 10

_NORMAL_95 = 1.959963984540054


@dataclass(frozen=True, eq=False)
class HurstEstimate:
    """Point estimate with optional 95% interval and method diagnostics."""

    h_hat: float
    method: str
    ci_low: float | None = None
    ci_high: float | None = None
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not 0.0 < self.h_hat < 1.5:
            raise ValueError(f"estimate {self.h_hat} outside the reportable (0, 1.5)")
        if (self.ci_low is None) != (self.ci_high is None):
            raise ValueError("confidence bounds must be given together")
        if self.ci_low is not None and not self.ci_low <= self.h_hat <= self.ci_high:
            raise ValueError("confidence interval must contain the estimate")


@dataclass(frozen=True, eq=False)
class Periodogram:
    """Ordinates I(lam_j) at Fourier frequencies lam_j = 2 pi j / N."""

    frequencies: np.ndarray
    ordinates: np.ndarray
    n: int

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        ords = np.asarray(self.ordinates, dtype=float)
        if freqs.shape != ords.shape:
            raise ValueError("frequencies and ordinates must have matching shapes")
        if ords.size != (self.n - 1) // 2:
            raise ValueError("ordinate count must equal floor((N-1)/2)")
        if np.any(ords < 0.0):
            raise ValueError("ordinates must be nonnegative")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "ordinates", ords)


def periodogram(series) -> Periodogram:
    """Mean-removed periodogram I(lam_j) = |sum (x_t - xbar) e^(-i t lam_j)|^2 / (2 pi N)."""
    ts = as_series(series)
    n = len(ts)
    if n < 16:
        raise ValueError(f"periodogram needs at least 16 samples, got {n}")
    y = ts.values - ts.values.mean()
    spectrum = np.fft.rfft(y)
    m = (n - 1) // 2
    ordinates = np.abs(spectrum[1 : m + 1]) ** 2 / (2.0 * np.pi * n)
    frequencies = 2.0 * np.pi * np.arange(1, m + 1) / n
    return Periodogram(frequencies, ordinates, n)


def weighted_linear_fit(x, y, w) -> tuple[float, float, float]:
    """Weighted least squares y ~ a + b x; returns (b, a, stderr(b)).

    The slope standard error is scaled by the weighted residual variance, so
    an exact line has stderr 0 regardless of the weights.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if not (x.shape == y.shape == w.shape):
        raise ValueError("x, y and w must have matching shapes")
    if np.any(w <= 0.0):
        raise ValueError("weights must be positive")
    if x.size < 2 or np.all(x == x[0]):
        raise ValueError("singular fit: need at least 2 distinct x values")
    wsum = w.sum()
    xbar = np.dot(w, x) / wsum
    ybar = np.dot(w, y) / wsum
    dx = x - xbar
    sxx = np.dot(w, dx**2)
    slope = np.dot(w, dx * (y - ybar)) / sxx
    intercept = ybar - slope * xbar
    residuals = y - intercept - slope * x
    dof = x.size - 2
    variance = np.dot(w, residuals**2) / dof if dof > 0 else 0.0
    return float(slope), float(intercept), float(np.sqrt(max(variance, 0.0) / sxx))


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    return float(np.dot(xc, yc) / denom) if denom > 0 else 0.0


def _finalize(h: float, method: str, ci=None, aux=None) -> HurstEstimate:
    if not 0.0 < h < 1.5:
        raise EstimationError(f"{method} estimate {h:.4f} falls outside (0, 1.5)")
    aux = dict(aux or {})
    if h > 1.0:
        aux["non_stationary"] = True
    low, high = ci if ci is not None else (None, None)
    return HurstEstimate(h_hat=h, method=method, ci_low=low, ci_high=high, aux=aux)


# ---------------------------------------------------------------------------
# Whittle estimator
# ---------------------------------------------------------------------------
#
# The fGn density splits into a singular factor lam^(-2H-1), evaluated exactly
# at every Fourier frequency, and an aliased-image sum that is smooth and even
# on [0, pi].  The image sum is evaluated on a fixed node grid and carried to
# the data frequencies by a clamped cubic spline; interpolation error is
# orders of magnitude below the 1e-6 density budget (tested against
# fgn_spectral_density).

_SPLINE_NODES = np.linspace(0.0, np.pi, 1025)
_node_log_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_cache_lock = threading.Lock()


def _node_log_bases(truncation: int) -> tuple[np.ndarray, np.ndarray]:
    with _cache_lock:
        if truncation not in _node_log_cache:
            j = 2.0 * np.pi * np.arange(1, truncation + 1)
            lam = _SPLINE_NODES[:, None]
            _node_log_cache[truncation] = (np.log(j + lam), np.log(j - lam))
        return _node_log_cache[truncation]


def _image_spline(h: float, truncation: int) -> CubicSpline:
    a = 2.0 * h + 1.0
    log_plus, log_minus = _node_log_bases(truncation)
    values = np.exp(-a * log_plus).sum(axis=1) + np.exp(-a * log_minus).sum(axis=1)
    edge = 2.0 * np.pi * (truncation + 0.5)
    values += ((edge + _SPLINE_NODES) ** (1.0 - a) + (edge - _SPLINE_NODES) ** (1.0 - a)) / (
        2.0 * np.pi * (a - 1.0)
    )
    # The image sum is even in lam: clamp the derivative at 0.
    return CubicSpline(_SPLINE_NODES, values, bc_type=((1, 0.0), "not-a-knot"))


def whittle_density_shape(
    frequencies: np.ndarray,
    h: float,
    truncation: int = DEFAULT_SPECTRAL_TRUNCATION,
    log_frequencies: np.ndarray | None = None,
) -> np.ndarray:
    """Unit-variance fGn density on (0, pi], via the spline-accelerated image sum."""
    if log_frequencies is None:
        log_frequencies = np.log(frequencies)
    a = 2.0 * h + 1.0
    image = _image_spline(h, truncation)(frequencies)
    shape = np.exp(-a * log_frequencies) + image
    scale = math.sin(math.pi * h) * math.gamma(2.0 * h + 1.0) / (2.0 * np.pi)
    return 2.0 * scale * (1.0 - np.cos(frequencies)) * shape


def _whittle_objective(pgram: Periodogram, truncation: int):
    freqs = pgram.frequencies
    log_freqs = np.log(freqs)
    ordinates = pgram.ordinates
    m = ordinates.size
    evals = {"count": 0}

    def objective(h: float) -> float:
        evals["count"] += 1
        g = whittle_density_shape(freqs, h, truncation, log_freqs)
        scale_hat = np.mean(ordinates / g)
        return m * math.log(scale_hat) + float(np.log(g).sum())

    return objective, evals


def estimate_whittle(
    series, truncation: int = DEFAULT_SPECTRAL_TRUNCATION
) -> HurstEstimate:
    """Whittle maximum-likelihood fit of the fGn density to the periodogram.

    Minimizes the variance-profiled Whittle functional
    Q(H) = sum_j [ I(lam_j)/f(lam_j; H) + log f(lam_j; H) ]
    over H in [0.01, 0.99] with the process variance set to its per-H maximum
    likelihood value, which makes the estimate exactly scale-invariant.  The
    95% interval comes from the curvature of Q at the optimum (observed
    information of the Whittle likelihood).
    """
    ts = as_series(series)
    n = len(ts)
    if n < 64:
        raise ValueError(f"whittle needs at least 64 samples, got {n}")
    pgram = periodogram(ts)
    if not np.any(pgram.ordinates > 0.0):
        raise DegenerateSeriesError("constant series: periodogram is identically zero")
    objective, evals = _whittle_objective(pgram, truncation)
    result = minimize_scalar(
        objective,
        bounds=WHITTLE_BOUNDS,
        method="bounded",
        options={"xatol": WHITTLE_XTOL, "maxiter": WHITTLE_MAXITER},
    )
    if not result.success:
        raise EstimationError(f"whittle optimizer did not converge: {result.message}")
    h_hat = _parabolic_polish(objective, float(result.x))
    variance = _curvature_variance(objective, h_hat)
    ci = None
    aux = {
        "objective": objective(h_hat),
        "sigma2_hat": _profiled_scale(pgram, h_hat, truncation),
        "objective_evaluations": evals["count"],
        "truncation": truncation,
    }
    if n < 128:
        aux["short_series_warning"] = True
    if variance is not None:
        margin = _NORMAL_95 * math.sqrt(variance)
        ci = (h_hat - margin, h_hat + margin)
    else:
        aux["curvature_degenerate"] = True
    return _finalize(h_hat, "whittle", ci=ci, aux=aux)


def _profiled_scale(pgram: Periodogram, h: float, truncation: int) -> float:
    g = whittle_density_shape(pgram.frequencies, h, truncation)
    return float(np.mean(pgram.ordinates / g))


def _parabolic_polish(objective, h0: float, delta: float = 1e-4) -> float:
    """One exact parabolic step; pins the optimum down to ~1e-10 regardless of
    tiny objective noise, which keeps scale/shift invariance below 1e-9."""
    lo, hi = WHITTLE_BOUNDS
    center = min(max(h0, lo + delta), hi - delta)
    f_minus = objective(center - delta)
    f_center = objective(center)
    f_plus = objective(center + delta)
    denom = f_minus - 2.0 * f_center + f_plus
    if denom <= 0.0:
        return h0
    vertex = center + 0.5 * delta * (f_minus - f_plus) / denom
    return min(max(vertex, lo), hi)


def _curvature_variance(objective, h: float, step: float = 1e-3) -> float | None:
    lo, hi = WHITTLE_BOUNDS
    center = min(max(h, lo + step), hi - step)
    second = (
        objective(center - step) - 2.0 * objective(center) + objective(center + step)
    ) / step**2
    if second <= 0.0:
        return None
    return 1.0 / second


# ---------------------------------------------------------------------------
# Abry-Veitch wavelet estimator
# ---------------------------------------------------------------------------


def estimate_abry_veitch(
    series, j1: int = DEFAULT_J1, j2: int | None = None, wavelet: str = "db3"
) -> HurstEstimate:
    """Weighted log-variance regression across wavelet octaves; h = (slope+1)/2.

    Octaves below j1 (default 3) are discarded as filter-initialization
    contaminated; j2 defaults to the deepest octave with at least 4
    coefficients.
    """
    if j1 < 1:
        raise ValueError("j1 must be at least 1")
    diagram = dwt_detail_variances(series, max_level=None, wavelet=wavelet)
    top = int(diagram.levels[-1]) if diagram.levels.size else 0
    j2_eff = top if j2 is None else j2
    if j2_eff > top or j2_eff < j1:
        raise EstimationError(
            f"level range [{j1}, {j2_eff}] not usable; series supports up to {top}"
        )
    mask = (diagram.levels >= j1) & (diagram.levels <= j2_eff)
    if mask.sum() < 3:
        raise EstimationError(
            f"only {int(mask.sum())} usable octaves in [{j1}, {j2_eff}]; need 3"
        )
    log_vars = diagram.log_variances[mask]
    if not np.all(np.isfinite(log_vars)):
        raise DegenerateSeriesError("zero detail variance inside the level range")
    slope, intercept, stderr = weighted_linear_fit(
        diagram.levels[mask].astype(float), log_vars, diagram.weights[mask]
    )
    h = (slope + 1.0) / 2.0
    margin = _NORMAL_95 * stderr / 2.0
    aux = {
        "slope": slope,
        "intercept": intercept,
        "j1": j1,
        "j2": j2_eff,
        "wavelet": wavelet,
        "coefficient_counts": diagram.counts[mask].tolist(),
    }
    return _finalize(h, "abry_veitch", ci=(h - margin, h + margin), aux=aux)


# ---------------------------------------------------------------------------
# Low-frequency periodogram regression
# ---------------------------------------------------------------------------


def estimate_periodogram(
    series, lowfreq_fraction: float = DEFAULT_LOWFREQ_FRACTION
) -> HurstEstimate:
    """OLS of log I(lam) on log lam over the lowest fraction of frequencies.

    The fitted slope s estimates 1 - 2H, so h = (1 - s)/2.
    """
    if not 0.0 < lowfreq_fraction <= 0.5:
        raise ValueError("lowfreq_fraction must lie in (0, 0.5]")
    ts = as_series(series)
    if len(ts) < 64:
        raise ValueError(f"periodogram estimator needs at least 64 samples, got {len(ts)}")
    pgram = periodogram(ts)
    count = int(pgram.ordinates.size * lowfreq_fraction)
    freqs = pgram.frequencies[:count]
    ords = pgram.ordinates[:count]
    positive = ords > 0.0
    if positive.sum() < 4:
        raise EstimationError(
            f"fit window holds {int(positive.sum())} usable frequencies; need 4"
        )
    log_f = np.log(freqs[positive])
    log_i = np.log(ords[positive])
    slope, intercept, stderr = weighted_linear_fit(log_f, log_i, np.ones_like(log_f))
    h = (1.0 - slope) / 2.0
    aux = {
        "slope": slope,
        "intercept": intercept,
        "fit_frequencies": int(positive.sum()),
        "lowfreq_fraction": lowfreq_fraction,
    }
    return _finalize(h, "periodogram", aux=aux)


# ---------------------------------------------------------------------------
# Rescaled range (R/S)
# ---------------------------------------------------------------------------


def _rs_block_sizes(n: int, min_block: int) -> np.ndarray:
    lo = math.log10(min_block)
    hi = math.log10(n // 2)
    count = max(int(round((hi - lo) * RS_SIZES_PER_DECADE)) + 1, 2)
    sizes = np.unique(np.round(10.0 ** np.linspace(lo, hi, count)).astype(int))
    return sizes[(sizes >= min_block) & (sizes <= n // 2)]


def estimate_rs(series, min_block: int = DEFAULT_MIN_BLOCK) -> HurstEstimate:
    """Pox-plot rescaled-range estimate: slope of log E[R/S] vs log block size.

    Non-overlapping blocks at ~10 logarithmically spaced sizes per decade;
    the rescaled range of a block is the range of its mean-adjusted
    cumulative sums over its standard deviation.  Zero-variance blocks are
    skipped; a size with no surviving blocks is dropped.
    """
    if min_block < 8:
        raise ValueError("min_block must be at least 8")
    ts = as_series(series)
    n = len(ts)
    if n < 2 * min_block:
        raise ValueError(f"series length {n} is below 2 * min_block")
    values = ts.values
    sizes, mean_rs = [], []
    for d in _rs_block_sizes(n, min_block):
        blocks = n // d
        segment = values[: blocks * d].reshape(blocks, d)
        centered = segment - segment.mean(axis=1, keepdims=True)
        walks = np.cumsum(centered, axis=1)
        ranges = walks.max(axis=1) - walks.min(axis=1)
        stds = segment.std(axis=1)
        valid = stds > 0.0
        if not np.any(valid):
            continue
        sizes.append(d)
        mean_rs.append(np.mean(ranges[valid] / stds[valid]))
    if len(sizes) < 4:
        raise DegenerateSeriesError(
            f"only {len(sizes)} usable block sizes survive; need 4"
        )
    log_d = np.log(np.asarray(sizes, dtype=float))
    log_rs = np.log(np.asarray(mean_rs))
    slope, intercept, stderr = weighted_linear_fit(log_d, log_rs, np.ones_like(log_d))
    aux = {
        "intercept": intercept,
        "fit_correlation": _pearson(log_d, log_rs),
        "block_sizes": [int(d) for d in sizes],
        "min_block": min_block,
    }
    return _finalize(float(slope), "rs", aux=aux)


# ---------------------------------------------------------------------------
# Dispatch by method tag
# ---------------------------------------------------------------------------

_ESTIMATOR_FUNCTIONS = {
    "whittle": estimate_whittle,
    "abry_veitch": estimate_abry_veitch,
    "periodogram": estimate_periodogram,
    "rs": estimate_rs,
}


def make_estimator(method: str, **params):
    """Bind a method tag (plus optional keyword overrides) to a callable."""
    try:
        fn = _ESTIMATOR_FUNCTIONS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; options: {METHODS}")

    def estimator(series) -> HurstEstimate:
        return fn(series, **params)

    return estimator
