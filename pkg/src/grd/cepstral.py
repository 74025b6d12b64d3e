"""Cepstral coefficients in the graph-frequency domain.

GFCC takes an orthonormal cosine transform of the log power spectrum of a
frame's graph-frequency coefficients. GFLC first stacks the magnitude
spectrum with its log-compressed copy (doubling the length) and takes the
same transform of the stacked log power. Both truncate to a configured
number of coefficients. A small floor is applied inside every logarithm
so silent frames stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio import AudioSignal, FrameConfig, frame_signal
from .features import FeatureKind, FeatureMatrix, quantize_rows
from .graph import GraphSpec, get_basis, gft_frames


@dataclass(frozen=True)
class CepstralConfig:
    n_ceps: int = 60
    log_floor: float = 1e-10
    append_log_energy: bool = False

    def __post_init__(self):
        if self.n_ceps < 1:
            raise ValueError("n_ceps must be positive")
        if not self.log_floor > 0:
            raise ValueError("log_floor must be positive")


@lru_cache(maxsize=16)
def dct_matrix(n_in: int, n_out: int) -> np.ndarray:
    """Rows z of the orthonormal cosine transform, truncated to n_out.

    Row z is s(z) * cos((i + 0.5) * pi * z / n_in) with s(0) = sqrt(1/n_in)
    and s(z>0) = sqrt(2/n_in), so the full square matrix is orthonormal.
    """
    if not 1 <= n_out <= n_in:
        raise ValueError("n_out must satisfy 1 <= n_out <= n_in")
    i = np.arange(n_in)
    z = np.arange(n_out)[:, None]
    mat = np.cos((i + 0.5) * np.pi * z / n_in)
    scale = np.full(n_out, np.sqrt(2.0 / n_in))
    scale[0] = np.sqrt(1.0 / n_in)
    mat *= scale[:, None]
    mat.setflags(write=False)
    return mat


def _gfcc_rows(spectra: np.ndarray, cfg: CepstralConfig) -> np.ndarray:
    n = spectra.shape[1]
    log_power = np.log(np.maximum(spectra**2, cfg.log_floor))
    return log_power @ dct_matrix(n, cfg.n_ceps).T


def _gflc_rows(spectra: np.ndarray, cfg: CepstralConfig) -> np.ndarray:
    mag = np.abs(spectra)
    stacked = np.concatenate([mag, np.log(np.maximum(mag, cfg.log_floor))], axis=1)
    log_power = 2.0 * np.log(np.maximum(np.abs(stacked), cfg.log_floor))
    return log_power @ dct_matrix(stacked.shape[1], cfg.n_ceps).T


def gfcc_frame(spectrum: np.ndarray, cfg: CepstralConfig) -> np.ndarray:
    """Cepstrum of one graph-frequency spectrum."""
    spectrum = np.atleast_2d(np.asarray(spectrum, dtype=np.float64))
    return _gfcc_rows(spectrum, cfg)[0]


def gflc_frame(spectrum: np.ndarray, cfg: CepstralConfig) -> np.ndarray:
    """Cepstrum of the magnitude/log-magnitude stack of one spectrum."""
    spectrum = np.atleast_2d(np.asarray(spectrum, dtype=np.float64))
    return _gflc_rows(spectrum, cfg)[0]


def append_log_energy(
    feat_row: np.ndarray, frame: np.ndarray, log_floor: float = 1e-10
) -> np.ndarray:
    """Append the frame's log energy as an extra trailing dimension."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise ValueError("frame must be nonempty")
    energy = np.log(max(float(np.sum(frame**2)), log_floor))
    return np.append(np.asarray(feat_row, dtype=np.float64), energy)


def cmvn(m: FeatureMatrix) -> FeatureMatrix:
    """Per-utterance, per-dimension mean/variance normalization.

    Uses the population standard deviation (1/T); dimensions with stddev
    below 1e-12 are only mean-subtracted.
    """
    if m.num_frames < 1:
        raise ValueError("cmvn needs at least one frame")
    centered = m.data - m.data.mean(axis=0)
    std = m.data.std(axis=0)
    scale = np.where(std < 1e-12, 1.0, std)
    return FeatureMatrix(kind=m.kind, data=centered / scale)


def extract_features(
    sig: AudioSignal,
    kind: FeatureKind,
    frame_cfg: FrameConfig,
    graph_spec: GraphSpec,
    ceps_cfg: CepstralConfig,
    apply_cmvn: bool = False,
) -> FeatureMatrix:
    """Full per-utterance pipeline for the base cepstral kinds.

    Frames -> graph Fourier transform -> cepstrum per frame, then the
    optional log-energy append and optional CMVN. Output values pass
    through the float32 grid so results match feature files bit-exactly.
    """
    if kind not in (FeatureKind.GFCC, FeatureKind.GFLC):
        raise ValueError(f"extract_features handles GFCC/GFLC, not {kind.name}")
    if graph_spec.size != frame_cfg.frame_len:
        raise ValueError("graph size must equal the frame length")

    frames = frame_signal(sig, frame_cfg)
    spectra = gft_frames(get_basis(graph_spec), frames)
    if kind is FeatureKind.GFCC:
        rows = _gfcc_rows(spectra, ceps_cfg)
    else:
        rows = _gflc_rows(spectra, ceps_cfg)

    if ceps_cfg.append_log_energy:
        energy = np.log(np.maximum(np.sum(frames**2, axis=1), ceps_cfg.log_floor))
        rows = np.column_stack([rows, energy])

    out = FeatureMatrix(kind=kind, data=rows)
    if apply_cmvn:
        out = cmvn(out)
    return FeatureMatrix(kind=kind, data=quantize_rows(out.data))
