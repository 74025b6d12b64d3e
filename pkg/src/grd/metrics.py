"""Equal error rate and detection operating points from labeled scores.

Higher scores mean "more genuine". Thresholds are swept at the midpoints
between adjacent distinct scores (plus one below the minimum and one
above the maximum); tied scores collapse into a single operating point.
At threshold t, FRR(t) is the fraction of genuine trials scoring below t
and FAR(t) the fraction of spoof trials scoring at or above t. The EER is
the crossing of the two curves, linearly interpolated between adjacent
operating points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .ioutil import atomic_write_text
from .protocol import Label


@dataclass(frozen=True)
class EvalResult:
    eer: float
    threshold: float
    n_genuine: int
    n_spoof: int


def _operating_points(
    trials: Sequence[tuple[float, Label]],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, int]:
    genuine = np.sort([s for s, lab in trials if lab is Label.GENUINE])
    spoof = np.sort([s for s, lab in trials if lab is Label.SPOOF])
    if len(genuine) == 0 or len(spoof) == 0:
        raise ValueError("need at least one genuine and one spoof trial")
    scores = np.unique(np.concatenate([genuine, spoof]))
    thresholds = np.concatenate(
        [[scores[0] - 1.0], 0.5 * (scores[:-1] + scores[1:]), [scores[-1] + 1.0]]
    )
    frr = np.searchsorted(genuine, thresholds, side="left") / len(genuine)
    far = (len(spoof) - np.searchsorted(spoof, thresholds, side="left")) / len(spoof)
    return thresholds, far, frr, len(genuine), len(spoof)


def compute_eer(trials: Sequence[tuple[float, Label]]) -> EvalResult:
    """Equal error rate of (score, label) trials."""
    thresholds, far, frr, n_gen, n_spf = _operating_points(trials)
    diff = far - frr
    idx = int(np.argmax(diff <= 0.0))
    if diff[idx] == 0.0:
        eer = float(far[idx])
        threshold = float(thresholds[idx])
    else:
        frac = diff[idx - 1] / (diff[idx - 1] - diff[idx])
        eer = float(frr[idx - 1] + frac * (frr[idx] - frr[idx - 1]))
        threshold = float(thresholds[idx - 1] + frac * (thresholds[idx] - thresholds[idx - 1]))
    if eer > 0.5:
        warnings.warn("EER above 0.5: scores are anti-correlated with labels")
    return EvalResult(eer=eer, threshold=threshold, n_genuine=n_gen, n_spoof=n_spf)


def det_points(trials: Sequence[tuple[float, Label]]) -> list[tuple[float, float]]:
    """(FAR, FRR) at every operating point, swept by increasing threshold."""
    _, far, frr, _, _ = _operating_points(trials)
    return list(zip(far.tolist(), frr.tolist()))


def format_report(result: EvalResult) -> str:
    return f"EER={result.eer * 100.0:.4f} threshold={result.threshold:.6f}"


def read_scores(path: str | Path) -> list[tuple[str, float]]:
    """Read `utterance_id score` lines."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ValueError(f"{path}, line {lineno}: expected 'utterance_id score'")
        rows.append((tokens[0], float(tokens[1])))
    return rows


def write_scores(rows: Sequence[tuple[str, float]], path: str | Path) -> None:
    atomic_write_text(path, "".join(f"{utt} {score:.6f}\n" for utt, score in rows))
