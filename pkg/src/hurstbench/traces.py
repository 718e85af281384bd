"""Real-trace workflow: capture ingestion, windowed H scanning, phase
disaggregation and convergence profiles.

Captures arrive as CSV rows of (arrival timestamp, frame bytes) from a
sniffer export; they are binned into a uniform byte-count (or packet-count)
series, scanned with overlapping fixed-length windows, and disaggregated
into interleaved phases to profile estimator convergence.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .errors import CaptureFormatError, EstimationError
from .estimators import METHODS, make_estimator
from .fgn import TimeSeries, as_series
from .seriesfile import atomic_write_text

log = logging.getLogger(__name__)

# 10 ms bins give >= 2^16 points per busy hour; exposed as a flag.
DEFAULT_BIN_WIDTH = 0.010
# Window default matches the minimum length adopted for live traffic use.
DEFAULT_WINDOW = 2**8

SCAN_CSV_HEADER = "t_index,start_time,h_e,method,window,stride"
PROFILE_CSV_HEADER = "m,phases,failures,mean_h,spread"


@dataclass(frozen=True)
class CaptureRecord:
    """One captured frame: arrival time (seconds) and size (bytes)."""

    timestamp: float
    frame_bytes: int

    def __post_init__(self):
        if not np.isfinite(self.timestamp):
            raise ValueError("timestamp must be finite")
        if self.frame_bytes < 1:
            raise ValueError("frame_bytes must be at least 1")


@dataclass(frozen=True)
class ScanPlan:
    """Sliding-window schedule: window length, stride and estimator tag."""

    window: int
    stride: int
    estimator: str = "whittle"

    def __post_init__(self):
        if not 0 < self.stride < self.window:
            raise ValueError("stride must satisfy 0 < stride < window")
        if self.estimator not in METHODS:
            raise ValueError(f"unknown estimator tag {self.estimator!r}")


@dataclass(frozen=True)
class ScanPoint:
    """Windowed estimate at window start t_index; h_e is None for a window
    whose estimator failed (a gap, not an abort)."""

    t_index: int
    h_e: float | None


@dataclass(frozen=True, eq=False)
class PhaseSet:
    """Interleaved phase subseries: phase i holds samples at indices i mod m."""

    m: int
    phases: tuple[np.ndarray, ...]

    def interleave(self) -> np.ndarray:
        """Reconstruct the original sample order exactly."""
        total = sum(phase.size for phase in self.phases)
        out = np.empty(total)
        for i, phase in enumerate(self.phases):
            out[i :: self.m] = phase
        return out


def parse_capture_rows(lines) -> list[CaptureRecord]:
    """Parse `timestamp,frame_bytes` rows; an unparsable first content line
    is taken to be the optional header."""
    records = []
    seen_content = False
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        first = not seen_content
        seen_content = True
        parts = [part.strip() for part in line.split(",")]
        try:
            if len(parts) < 2:
                raise ValueError(f"expected `timestamp,frame_bytes`, got {line!r}")
            records.append(CaptureRecord(float(parts[0]), int(parts[1])))
        except (ValueError, OverflowError) as exc:
            if first:
                continue  # header row
            raise CaptureFormatError(
                f"line {number}: {exc}", line_number=number
            ) from exc
    return records


def bin_capture(
    records, bin_width: float = DEFAULT_BIN_WIDTH, count_packets: bool = False
) -> TimeSeries:
    """Uniform bins from first to last arrival; value = bytes (or packets)
    arriving in [start, start + width).  Empty bins are zero."""
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if not records:
        raise ValueError("no capture records to bin")
    records = sorted(records, key=lambda record: record.timestamp)
    origin = records[0].timestamp
    spans = int((records[-1].timestamp - origin) / bin_width) + 1
    values = np.zeros(spans)
    for record in records:
        index = int((record.timestamp - origin) / bin_width)
        values[index] += 1 if count_packets else record.frame_bytes
    return TimeSeries(values, origin=origin, step=bin_width)


def ingest_capture_csv(
    path, bin_width: float = DEFAULT_BIN_WIDTH, count_packets: bool = False
) -> TimeSeries:
    """Read a capture CSV and bin it into a uniform traffic series."""
    with open(path, "r", encoding="utf-8") as handle:
        records = parse_capture_rows(handle)
    if not records:
        raise CaptureFormatError(f"{path}: capture file holds no records")
    return bin_capture(records, bin_width=bin_width, count_packets=count_packets)


def sliding_scan(series, plan: ScanPlan) -> list[ScanPoint]:
    """Estimate H on windows starting at 0, stride, 2*stride, ... while the
    window fits; failed windows become gaps (h_e None), never aborts."""
    ts = as_series(series)
    total = len(ts)
    if total < plan.window:
        raise ValueError(f"series length {total} is below the window {plan.window}")
    estimator = make_estimator(plan.estimator)
    points = []
    for start in range(0, total - plan.window + 1, plan.stride):
        window = TimeSeries(ts.values[start : start + plan.window])
        try:
            estimate = estimator(window).h_hat
        except EstimationError as exc:
            log.debug("window at %d failed: %s", start, exc)
            estimate = None
        points.append(ScanPoint(t_index=start, h_e=estimate))
    return points


def disaggregate_phases(series, m: int) -> PhaseSet:
    """Split into m interleaved phases; lossless and deterministic."""
    ts = as_series(series)
    if m < 1:
        raise ValueError("m must be a positive integer")
    if m > len(ts) // 4:
        raise ValueError(
            f"m={m} leaves phases shorter than 4 samples (length {len(ts)})"
        )
    phases = tuple(ts.values[i::m].copy() for i in range(m))
    return PhaseSet(m=m, phases=phases)


@dataclass(frozen=True)
class ProfileRow:
    """Convergence profile entry for one disaggregation factor."""

    m: int
    phases: int
    failures: int
    mean_h: float | None
    spread: float | None


def convergence_profile(series, estimator: str, m_values) -> list[ProfileRow]:
    """Estimate H on every phase for each m; report mean and spread across
    phases.  m = 1 reduces to the direct whole-series estimate."""
    ts = as_series(series)
    fn = make_estimator(estimator)
    rows = []
    for m in m_values:
        phase_set = disaggregate_phases(ts, m)
        estimates = []
        failures = 0
        for phase in phase_set.phases:
            try:
                estimates.append(fn(TimeSeries(phase)).h_hat)
            except EstimationError as exc:
                log.debug("phase of m=%d failed: %s", m, exc)
                failures += 1
        if estimates:
            mean_h = float(np.mean(estimates))
            spread = (
                float(np.std(estimates, ddof=1)) if len(estimates) > 1 else 0.0
            )
        else:
            mean_h = spread = None
        rows.append(
            ProfileRow(
                m=m,
                phases=len(estimates),
                failures=failures,
                mean_h=mean_h,
                spread=spread,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def scan_to_csv(points, plan: ScanPlan, origin: float | None, step: float | None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCAN_CSV_HEADER.split(","))
    t0 = origin if origin is not None else 0.0
    dt = step if step is not None else 1.0
    for point in points:
        writer.writerow(
            [
                point.t_index,
                repr(t0 + point.t_index * dt),
                "" if point.h_e is None else repr(point.h_e),
                plan.estimator,
                plan.window,
                plan.stride,
            ]
        )
    return buffer.getvalue()


def write_scan_csv(path, points, plan: ScanPlan, series: TimeSeries) -> None:
    atomic_write_text(path, scan_to_csv(points, plan, series.origin, series.step))


def profile_to_csv(rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PROFILE_CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(
            [
                row.m,
                row.phases,
                row.failures,
                "" if row.mean_h is None else repr(row.mean_h),
                "" if row.spread is None else repr(row.spread),
            ]
        )
    return buffer.getvalue()


def write_profile_csv(path, rows) -> None:
    atomic_write_text(path, profile_to_csv(rows))
