"""Per-frame graph construction and its Fourier basis.

Speech samples inside a frame are treated as nodes of a path or cycle
graph; the eigenvectors of the chosen graph operator (Laplacian or
adjacency), ordered by ascending eigenvalue, form the transform basis.
Projecting a frame onto this basis yields its graph-frequency spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np


class Topology(Enum):
    PATH = "path"
    CYCLE = "cycle"


class Operator(Enum):
    LAPLACIAN = "laplacian"
    ADJACENCY = "adjacency"


@dataclass(frozen=True)
class GraphSpec:
    topology: Topology = Topology.PATH
    size: int = 512
    operator: Operator = Operator.LAPLACIAN

    def __post_init__(self):
        if self.size < 2:
            raise ValueError("graph size must be at least 2")


@dataclass(frozen=True)
class GftBasis:
    """Orthonormal eigenvector columns with ascending eigenvalues."""

    vectors: np.ndarray
    eigenvalues: np.ndarray

    @property
    def size(self) -> int:
        return self.vectors.shape[0]


def adjacency_matrix(spec: GraphSpec) -> np.ndarray:
    n = spec.size
    a = np.zeros((n, n))
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    if spec.topology is Topology.CYCLE:
        a[0, n - 1] = 1.0
        a[n - 1, 0] = 1.0
    return a


def build_graph_basis(spec: GraphSpec) -> GftBasis:
    """Eigendecompose the graph operator with a deterministic sign convention.

    Each eigenvector column has its first entry of magnitude > 1e-12 made
    positive, so repeated builds are bit-identical.
    """
    a = adjacency_matrix(spec)
    if spec.operator is Operator.LAPLACIAN:
        op = np.diag(a.sum(axis=1)) - a
    else:
        op = a
    eigenvalues, vectors = np.linalg.eigh(op)

    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        nonzero = np.nonzero(np.abs(col) > 1e-12)[0]
        if nonzero.size and col[nonzero[0]] < 0:
            vectors[:, k] = -col

    vectors.setflags(write=False)
    eigenvalues.setflags(write=False)
    return GftBasis(vectors=vectors, eigenvalues=eigenvalues)


@lru_cache(maxsize=16)
def get_basis(spec: GraphSpec) -> GftBasis:
    """Cached basis lookup; GftBasis arrays are immutable and shareable."""
    return build_graph_basis(spec)


def gft(basis: GftBasis, frame: np.ndarray) -> np.ndarray:
    """Project one frame onto the basis: spectrum = U^T frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != (basis.size,):
        raise ValueError(f"frame length {frame.shape} does not match basis size {basis.size}")
    return basis.vectors.T @ frame


def gft_frames(basis: GftBasis, frames: np.ndarray) -> np.ndarray:
    """Batch transform: one spectrum row per frame row."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[1] != basis.size:
        raise ValueError("frames must be (num_frames, basis size)")
    return frames @ basis.vectors
