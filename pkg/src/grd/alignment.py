"""Dynamic time warping between two feature sequences.

The accumulated cost obeys acc(i,j) = d(i,j) + min(acc(i-1,j),
acc(i,j-1), acc(i-1,j-1)) with acc(0,0) = d(0,0) and edge rows/columns
accumulated, where d is the Euclidean distance between frames. The path
is recovered by backtracking with ties broken diagonal, then vertical,
then horizontal. Expanding both sequences along the path yields two
equal-length matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import FeatureMatrix


@dataclass(frozen=True)
class WarpPath:
    """Monotone index pairs from (0,0) to (m-1,n-1) and their summed cost."""

    steps: tuple[tuple[int, int], ...]
    total_cost: float


def local_cost(g_frame: np.ndarray, s_frame: np.ndarray) -> float:
    g = np.asarray(g_frame, dtype=np.float64)
    s = np.asarray(s_frame, dtype=np.float64)
    if g.shape != s.shape:
        raise ValueError("frames must have equal dimension")
    return float(np.linalg.norm(g - s))


def cost_matrix(g: FeatureMatrix, s: FeatureMatrix) -> np.ndarray:
    if g.dim != s.dim:
        raise ValueError("feature dimensions differ")
    diff = g.data[:, None, :] - s.data[None, :, :]
    return np.sqrt(np.sum(diff**2, axis=2))


def dtw_from_costs(costs: np.ndarray) -> WarpPath:
    """Optimal warping path for an explicit local-cost matrix."""
    d = np.asarray(costs, dtype=np.float64)
    if d.ndim != 2 or d.size == 0:
        raise ValueError("cost matrix must be nonempty and two-dimensional")
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise ValueError("costs must be finite and nonnegative")

    m, n = d.shape
    acc = np.empty_like(d)
    acc[0, 0] = d[0, 0]
    acc[0, 1:] = d[0, 1:].cumsum() + d[0, 0]
    acc[1:, 0] = d[1:, 0].cumsum() + d[0, 0]
    for i in range(1, m):
        row = acc[i]
        prev = acc[i - 1]
        di = d[i]
        for j in range(1, n):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = di[j] + best

    i, j = m - 1, n - 1
    steps = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag = acc[i - 1, j - 1]
            vert = acc[i - 1, j]
            horz = acc[i, j - 1]
            if diag <= vert and diag <= horz:
                i, j = i - 1, j - 1
            elif vert <= horz:
                i -= 1
            else:
                j -= 1
        steps.append((i, j))
    steps.reverse()
    return WarpPath(steps=tuple(steps), total_cost=float(acc[m - 1, n - 1]))


def dtw_align(g: FeatureMatrix, s: FeatureMatrix) -> WarpPath:
    """Align a genuine sequence with its replay counterpart."""
    if g.num_frames == 0 or s.num_frames == 0:
        raise ValueError("both sequences must be nonempty")
    return dtw_from_costs(cost_matrix(g, s))


def expand_along_path(
    g: FeatureMatrix, s: FeatureMatrix, path: WarpPath
) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Replicate rows along the path so both outputs have len(path) rows."""
    gi = np.array([i for i, _ in path.steps])
    sj = np.array([j for _, j in path.steps])
    if gi.min() < 0 or gi.max() >= g.num_frames or sj.min() < 0 or sj.max() >= s.num_frames:
        raise ValueError("path indices out of range for the given matrices")
    return (
        FeatureMatrix(kind=g.kind, data=g.data[gi]),
        FeatureMatrix(kind=s.kind, data=s.data[sj]),
    )
