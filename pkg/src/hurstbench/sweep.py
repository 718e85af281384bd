"""Monte-Carlo benchmark sweep over (estimator, nominal H, series length).

Every cell of the grid draws R seeded fGn series; the same series feeds all
estimators in the cell (paired comparison).  Per-replication seeds come from
a fixed avalanche mix of (base_seed, h_index, n_index, replication), so the
output table is a pure function of the configuration regardless of worker
count or scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EstimationError
from .estimators import METHODS, make_estimator
from .fgn import FgnModel
from .generator import GeneratorSpec, generate_fgn
from .seriesfile import atomic_write_text

log = logging.getLogger(__name__)

PAPER_H_VALUES = (0.5, 0.6, 0.7, 0.8, 0.9)
PAPER_LOG2_N_VALUES = tuple(range(6, 17))
PAPER_REPLICATIONS = 200
QUICK_LOG2_N_VALUES = tuple(range(6, 14))
QUICK_REPLICATIONS = 20

# Replications per worker task; fixed so task boundaries never depend on the
# worker count.
_TASK_CHUNK = 25

FAILURE_FLAG_FRACTION = 0.05

METRICS_CSV_HEADER = (
    "estimator,h0,log2_n,replications,failures,mean,bias,sigma,mse,label"
)


class PrecisionLabel(Enum):
    """Bias/deviation bands; Inconclusive covers the gaps between the bands."""

    HIGH_PRECISION = "HighPrecision"
    ACCEPTABLE = "Acceptable"
    BIASED = "Biased"
    INCONCLUSIVE = "Inconclusive"


def classify_precision(bias: float, sigma: float) -> PrecisionLabel:
    """Classify a (bias, sigma) pair; bands apply to |bias|.

    HighPrecision: |b| <= 0.03 and sigma <= 0.01
    Acceptable:    0.03 < |b| < 0.05 and sigma <= 0.02
    Biased:        |b| > 0.1
    Inconclusive:  everything else.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    b = abs(bias)
    if b <= 0.03 and sigma <= 0.01:
        return PrecisionLabel.HIGH_PRECISION
    if 0.03 < b < 0.05 and sigma <= 0.02:
        return PrecisionLabel.ACCEPTABLE
    if b > 0.1:
        return PrecisionLabel.BIASED
    return PrecisionLabel.INCONCLUSIVE


def meets_or_beats(label: PrecisionLabel, target: PrecisionLabel) -> bool:
    """True when label is at least as good as target (HighPrecision best)."""
    order = {PrecisionLabel.HIGH_PRECISION: 0, PrecisionLabel.ACCEPTABLE: 1}
    if target not in order:
        raise ValueError(f"{target.value} is not a usable criterion")
    return label in order and order[label] <= order[target]


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition: nominal H values, lengths 2^i, replications, methods."""

    h_values: tuple[float, ...] = PAPER_H_VALUES
    log2_n_values: tuple[int, ...] = PAPER_LOG2_N_VALUES
    replications: int = PAPER_REPLICATIONS
    estimators: tuple[str, ...] = METHODS
    base_seed: int = 0
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.h_values or any(not 0.0 < h < 1.0 for h in self.h_values):
            raise ValueError("h_values must be nonempty and inside (0, 1)")
        if not self.log2_n_values or any(i < 2 for i in self.log2_n_values):
            raise ValueError("log2_n_values must be nonempty exponents >= 2")
        if list(self.log2_n_values) != sorted(set(self.log2_n_values)):
            raise ValueError("log2_n_values must be strictly increasing")
        if self.replications < 2:
            raise ValueError("need at least 2 replications for a sample sigma")
        unknown = set(self.estimators) - set(METHODS)
        if not self.estimators or unknown:
            raise ValueError(f"estimators must be a nonempty subset of {METHODS}")
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must fit in 64 unsigned bits")


def paper_config(base_seed: int, estimators: tuple[str, ...] = METHODS) -> SweepConfig:
    """The benchmark grid: H in {0.5..0.9}, N = 2^6..2^16, 200 replications."""
    return SweepConfig(base_seed=base_seed, estimators=estimators)


def quick_config(base_seed: int, estimators: tuple[str, ...] = METHODS) -> SweepConfig:
    """CI-sized preset: 20 replications, lengths up to 2^13."""
    return SweepConfig(
        log2_n_values=QUICK_LOG2_N_VALUES,
        replications=QUICK_REPLICATIONS,
        base_seed=base_seed,
        estimators=estimators,
    )


_MASK64 = (1 << 64) - 1


def _avalanche64(value: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit words."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_seed(base_seed: int, h_index: int, n_index: int, replication: int) -> int:
    """Per-replication generator seed.

    Packs (h_index, n_index, replication) into bits 48-63, 40-47 and 0-39 and
    avalanches them against the avalanched base seed.  The packing and mixing
    are frozen: changing them would invalidate every recorded table.
    """
    if not 0 <= h_index < 1 << 16:
        raise ValueError("h_index out of packing range")
    if not 0 <= n_index < 1 << 8:
        raise ValueError("n_index out of packing range")
    if not 0 <= replication < 1 << 40:
        raise ValueError("replication out of packing range")
    packed = (h_index << 48) | (n_index << 40) | replication
    return _avalanche64(_avalanche64(base_seed) ^ packed)


@dataclass(frozen=True)
class MetricsRow:
    """Per-(estimator, H0, N) summary; metrics are None when every
    replication failed."""

    estimator: str
    h0: float
    log2_n: int
    replications: int
    failures: int
    mean_estimate: float | None
    bias: float | None
    sigma: float | None
    mse: float | None
    label: PrecisionLabel

    def __post_init__(self):
        if self.mse is not None and self.bias is not None:
            if self.mse < self.bias**2 - 1e-12:
                raise ValueError("mse must not fall below bias^2")
        if self.sigma is not None and self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class MinLengthFinding:
    """Smallest benchmarked length meeting a precision criterion, if any."""

    estimator: str
    n_min: int | None
    criterion: PrecisionLabel


def compute_metrics(estimates, h0: float) -> tuple[float, float, float, float]:
    """(mean, bias, sigma, mse) of a replication set against nominal h0.

    bias = h0 - mean; sigma uses the (R-1) denominator; mse averages squared
    deviations from h0 with the R denominator.
    """
    values = np.asarray(estimates, dtype=float)
    if values.size < 2:
        raise ValueError("need at least 2 estimates to summarize")
    if not np.all(np.isfinite(values)):
        raise ValueError("estimates must be finite")
    mean = float(values.mean())
    bias = h0 - mean
    sigma = float(values.std(ddof=1))
    mse = float(np.mean((values - h0) ** 2))
    return mean, bias, sigma, mse


def _run_task(args) -> list[tuple[int, int, int, str, dict]]:
    """One worker unit: replications [lo, hi) of a single (h, n) cell."""
    (h_index, n_index, rep_lo, rep_hi, h0, sigma2, n, base_seed, estimator_names) = args
    estimators = {name: make_estimator(name) for name in estimator_names}
    out = []
    for rep in range(rep_lo, rep_hi):
        seed = mix_seed(base_seed, h_index, n_index, rep)
        series = generate_fgn(GeneratorSpec(FgnModel(h0, sigma2), n, seed))
        checksum = hashlib.sha256(series.values.tobytes()).hexdigest()[:16]
        outcome: dict[str, float | None] = {}
        for name, fn in estimators.items():
            try:
                outcome[name] = fn(series).h_hat
            except EstimationError:
                outcome[name] = None
        out.append((h_index, n_index, rep, checksum, outcome))
    return out


def run_sweep(
    config: SweepConfig, threads: int = 1, collect_checksums: dict | None = None
) -> list[MetricsRow]:
    """Execute the sweep; returns one MetricsRow per (estimator, h0, log2_n).

    The same generated series feeds every estimator within a cell.  Estimator
    failures are excluded from the metrics and counted per row; rows with
    more than 5% failures are logged as flagged.  Output is independent of
    `threads`; pass a dict as `collect_checksums` to receive the per-
    replication series digests keyed by (h_index, n_index, replication).
    """
    tasks = []
    for h_index, h0 in enumerate(config.h_values):
        for n_index, log2_n in enumerate(config.log2_n_values):
            for lo in range(0, config.replications, _TASK_CHUNK):
                hi = min(lo + _TASK_CHUNK, config.replications)
                tasks.append(
                    (
                        h_index,
                        n_index,
                        lo,
                        hi,
                        h0,
                        config.sigma2,
                        1 << log2_n,
                        config.base_seed,
                        config.estimators,
                    )
                )
    results: dict[tuple[int, int], dict[int, dict]] = {}
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = pool.map(_run_task, tasks)
            batches = list(chunks)
    else:
        batches = [_run_task(task) for task in tasks]
    for batch in batches:
        for h_index, n_index, rep, checksum, outcome in batch:
            results.setdefault((h_index, n_index), {})[rep] = outcome
            if collect_checksums is not None:
                collect_checksums[(h_index, n_index, rep)] = checksum
    rows = []
    for h_index, h0 in enumerate(config.h_values):
        for n_index, log2_n in enumerate(config.log2_n_values):
            cell = results[(h_index, n_index)]
            for name in config.estimators:
                estimates = [
                    cell[rep][name]
                    for rep in range(config.replications)
                    if cell[rep][name] is not None
                ]
                failures = config.replications - len(estimates)
                if failures > FAILURE_FLAG_FRACTION * config.replications:
                    log.warning(
                        "cell (%s, h0=%s, N=2^%d): %d/%d replications failed",
                        name,
                        h0,
                        log2_n,
                        failures,
                        config.replications,
                    )
                if len(estimates) >= 2:
                    mean, bias, sigma, mse = compute_metrics(estimates, h0)
                    label = classify_precision(bias, sigma)
                else:
                    mean = bias = sigma = mse = None
                    label = PrecisionLabel.INCONCLUSIVE
                rows.append(
                    MetricsRow(
                        estimator=name,
                        h0=h0,
                        log2_n=log2_n,
                        replications=len(estimates),
                        failures=failures,
                        mean_estimate=mean,
                        bias=bias,
                        sigma=sigma,
                        mse=mse,
                        label=label,
                    )
                )
    return rows


def determine_min_length(
    rows, estimator: str, target: PrecisionLabel = PrecisionLabel.ACCEPTABLE
) -> MinLengthFinding:
    """Smallest N whose cells meet `target` for every h0, with every larger
    benchmarked N also meeting it; n_min is None when no such N exists."""
    mine = [row for row in rows if row.estimator == estimator]
    if not mine:
        raise ValueError(f"no rows for estimator {estimator!r}")
    exponents = sorted({row.log2_n for row in mine})
    h_values = sorted({row.h0 for row in mine})
    ok = {}
    for log2_n in exponents:
        cells = {row.h0: row for row in mine if row.log2_n == log2_n}
        ok[log2_n] = all(
            h0 in cells and meets_or_beats(cells[h0].label, target) for h0 in h_values
        )
    n_min = None
    for log2_n in reversed(exponents):
        if not ok[log2_n]:
            break
        n_min = 1 << log2_n
    return MinLengthFinding(estimator=estimator, n_min=n_min, criterion=target)


# ---------------------------------------------------------------------------
# File formats: metrics CSV (plot data for bias/sigma vs N) and findings JSON
# ---------------------------------------------------------------------------


def _format_value(value) -> str:
    if value is None:
        return ""
    return repr(value)


def metrics_to_csv(rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(METRICS_CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(
            [
                row.estimator,
                repr(row.h0),
                row.log2_n,
                row.replications,
                row.failures,
                _format_value(row.mean_estimate),
                _format_value(row.bias),
                _format_value(row.sigma),
                _format_value(row.mse),
                row.label.value,
            ]
        )
    return buffer.getvalue()


def write_metrics_csv(path, rows) -> None:
    atomic_write_text(path, metrics_to_csv(rows))


def read_metrics_csv(path) -> list[MetricsRow]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for record in reader:
            rows.append(
                MetricsRow(
                    estimator=record["estimator"],
                    h0=float(record["h0"]),
                    log2_n=int(record["log2_n"]),
                    replications=int(record["replications"]),
                    failures=int(record["failures"]),
                    mean_estimate=float(record["mean"]) if record["mean"] else None,
                    bias=float(record["bias"]) if record["bias"] else None,
                    sigma=float(record["sigma"]) if record["sigma"] else None,
                    mse=float(record["mse"]) if record["mse"] else None,
                    label=PrecisionLabel(record["label"]),
                )
            )
    return rows


def findings_to_json(findings) -> str:
    payload = {
        finding.estimator: {
            "n_min": finding.n_min,
            "criterion": finding.criterion.value,
        }
        for finding in findings
    }
    return json.dumps(payload, indent=2) + "\n"


def write_findings_json(path, findings) -> None:
    atomic_write_text(path, findings_to_json(findings))
