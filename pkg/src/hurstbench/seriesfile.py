"""Plain-text series files: `#` key=value header lines, one sample per line.

The format is shared by every command that reads or writes a series.
Generator output carries h, sigma2, n, seed and generator=davies-harte;
ingested captures carry origin, step and binning metadata instead.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .fgn import TimeSeries


def format_header(metadata: dict) -> list[str]:
    return [f"# {key}={value}" for key, value in metadata.items()]


def write_series(path, series: TimeSeries, metadata: dict | None = None) -> None:
    """Write a series file atomically (temp file + rename)."""
    meta = dict(metadata or {})
    meta.setdefault("n", len(series))
    if series.origin is not None:
        meta.setdefault("origin", repr(series.origin))
    if series.step is not None:
        meta.setdefault("step", repr(series.step))
    lines = format_header(meta)
    lines.extend(repr(float(v)) for v in series.values)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_series(path) -> tuple[TimeSeries, dict]:
    """Read a series file; returns the series and its header metadata."""
    values = []
    metadata: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            values.append(float(line))
    if not values:
        raise ValueError(f"{path}: no samples found")
    origin = float(metadata["origin"]) if "origin" in metadata else None
    step = float(metadata["step"]) if "step" in metadata else None
    return TimeSeries(np.asarray(values), origin=origin, step=step), metadata


def atomic_write_text(path, text: str) -> None:
    """Write text to path via a temp file in the same directory, then rename."""
    target = Path(path)
    handle = tempfile.NamedTemporaryFile(
        "w",
        encoding="utf-8",
        newline="\n",
        dir=target.parent if str(target.parent) else ".",
        prefix=f".{target.name}.",
        delete=False,
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, target)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise
