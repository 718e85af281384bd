"""Provenance manifests for command outputs.

Series files embed their manifest as `#` header lines; tabular outputs
(CSV/JSON) get a `<name>.manifest.json` sidecar so the data files stay
byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .seriesfile import atomic_write_text


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    command: str
    version: str
    flags: dict = field(default_factory=dict)
    base_seed: int | None = None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def add_input(self, path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path) -> None:
        self.outputs[str(path)] = file_digest(path)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "version": self.version,
            "flags": self.flags,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        if self.base_seed is not None:
            payload["base_seed"] = self.base_seed
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def write_sidecar(self, data_path) -> Path:
        sidecar = Path(str(data_path) + ".manifest.json")
        atomic_write_text(sidecar, self.to_json())
        return sidecar
