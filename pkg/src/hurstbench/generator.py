"""Exact fractional Gaussian noise synthesis by circulant embedding.

The Davies-Harte construction embeds the n-point fGn covariance in a
circulant matrix of size L (smallest power of two >= 2n), takes the real
eigenvalue spectrum by FFT, and colors complex Gaussian noise with its
square root.  One call consumes exactly L standard normal variates from a
counter-based Philox stream keyed by the seed, so output depends only on
(h, sigma2, n, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmbeddingError
from .fgn import FgnModel, TimeSeries, fgn_autocovariance

# Relative slack distinguishing FFT round-off from a genuine failure.
EIGENVALUE_TOLERANCE = 1e-9


def embedding_size(n: int) -> int:
    """Smallest power of two >= 2n."""
    if n < 2:
        raise ValueError("series length must be at least 2")
    return 1 << int(2 * n - 1).bit_length()


@dataclass(frozen=True)
class GeneratorSpec:
    """Reproducible generation request: model, length and 64-bit seed."""

    model: FgnModel
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("series length must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def circulant_eigenvalues(model: FgnModel, n: int) -> np.ndarray:
    """Eigenvalues of the circulant embedding of the fGn covariance.

    The first row is [rho(0), rho(1), ..., rho(L/2), rho(L/2-1), ..., rho(1)]
    with L the embedding size; its DFT is real for a symmetric row.  Raises
    EmbeddingError if an eigenvalue is negative beyond round-off (must not
    happen for a valid fGn model).
    """
    size = embedding_size(n)
    half = size // 2
    rho = fgn_autocovariance(model, np.arange(half + 1))
    row = np.concatenate([rho, rho[-2:0:-1]])
    spectrum = np.fft.fft(row)
    scale = abs(rho[0])
    if np.max(np.abs(spectrum.imag)) > EIGENVALUE_TOLERANCE * scale:
        raise EmbeddingError("circulant spectrum has a non-trivial imaginary part")
    eigenvalues = spectrum.real
    if eigenvalues.min() < -EIGENVALUE_TOLERANCE * scale:
        raise EmbeddingError(
            f"negative embedding eigenvalue {eigenvalues.min():.3e} for "
            f"h={model.h}, n={n}"
        )
    return np.maximum(eigenvalues, 0.0)


def generate_fgn(spec: GeneratorSpec) -> TimeSeries:
    """Generate n exact zero-mean fGn samples; identical seed, identical output.

    The complex synthesis pass yields two independent real series; only the
    first (real part) is returned.
    """
    lam = circulant_eigenvalues(spec.model, spec.n)
    size = lam.size
    half = size // 2
    normals = np.random.Generator(np.random.Philox(key=spec.seed)).standard_normal(size)
    weights = np.empty(size, dtype=complex)
    weights[0] = np.sqrt(lam[0] / size) * normals[0]
    weights[half] = np.sqrt(lam[half] / size) * normals[1]
    interior = np.sqrt(lam[1:half] / (2.0 * size))
    weights[1:half] = interior * (normals[2 : 2 * half : 2] + 1j * normals[3 : 2 * half : 2])
    weights[half + 1 :] = np.conj(weights[half - 1 : 0 : -1])
    samples = np.fft.fft(weights).real[: spec.n]
    return TimeSeries(samples)
