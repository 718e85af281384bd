"""Fractional Gaussian noise synthesis, Hurst estimation and minimum-length
benchmarking for self-similar traffic series."""

__version__ = "0.1.0"

from .errors import (
    CaptureFormatError,
    DegenerateSeriesError,
    EmbeddingError,
    EstimationError,
    HurstbenchError,
)
from .estimators import (
    HurstEstimate,
    Periodogram,
    estimate_abry_veitch,
    estimate_periodogram,
    estimate_rs,
    estimate_whittle,
    make_estimator,
    periodogram,
    weighted_linear_fit,
)
from .fgn import (
    AutocovarianceCurve,
    FgnModel,
    SpectralModel,
    TimeSeries,
    acf_tail_fit,
    aggregate_blocks,
    empirical_autocovariance,
    fgn_autocovariance,
    fgn_spectral_density,
    fgn_spectral_model,
)
from .generator import GeneratorSpec, circulant_eigenvalues, generate_fgn
from .seriesfile import read_series, write_series
from .sweep import (
    MetricsRow,
    MinLengthFinding,
    PrecisionLabel,
    SweepConfig,
    classify_precision,
    compute_metrics,
    determine_min_length,
    mix_seed,
    paper_config,
    quick_config,
    run_sweep,
)
from .traces import (
    CaptureRecord,
    PhaseSet,
    ScanPlan,
    ScanPoint,
    convergence_profile,
    disaggregate_phases,
    ingest_capture_csv,
    sliding_scan,
)
from .wavelet import LogscaleDiagram, dwt_detail_variances

__all__ = [
    "__version__",
    "AutocovarianceCurve",
    "CaptureFormatError",
    "CaptureRecord",
    "DegenerateSeriesError",
    "EmbeddingError",
    "EstimationError",
    "FgnModel",
    "GeneratorSpec",
    "HurstEstimate",
    "HurstbenchError",
    "LogscaleDiagram",
    "MetricsRow",
    "MinLengthFinding",
    "Periodogram",
    "PhaseSet",
    "PrecisionLabel",
    "ScanPlan",
    "ScanPoint",
    "SpectralModel",
    "SweepConfig",
    "TimeSeries",
    "acf_tail_fit",
    "aggregate_blocks",
    "circulant_eigenvalues",
    "classify_precision",
    "compute_metrics",
    "convergence_profile",
    "determine_min_length",
    "disaggregate_phases",
    "dwt_detail_variances",
    "empirical_autocovariance",
    "estimate_abry_veitch",
    "estimate_periodogram",
    "estimate_rs",
    "estimate_whittle",
    "fgn_autocovariance",
    "fgn_spectral_density",
    "fgn_spectral_model",
    "generate_fgn",
    "ingest_capture_csv",
    "make_estimator",
    "mix_seed",
    "paper_config",
    "periodogram",
    "quick_config",
    "read_series",
    "run_sweep",
    "sliding_scan",
    "weighted_linear_fit",
    "write_series",
]
