"""Feature matrices and their fixed binary file format.

A feature file is: magic "GFAT", u32 version (=1), u8 kind, u32 frame
count T, u32 dimension D, then T*D little-endian float32 values in
row-major order. The layout is fixed so files are bit-comparable across
implementations.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import FeatureFileError
from .ioutil import atomic_write_bytes

FEATURE_MAGIC = b"GFAT"
FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sIBII")


class FeatureKind(IntEnum):
    GFCC = 0
    GFLC = 1
    GFDCC = 2
    GFLDC = 3


#: base cepstral kind each device kind is derived from
DEVICE_BASE_KIND = {FeatureKind.GFDCC: FeatureKind.GFCC, FeatureKind.GFLDC: FeatureKind.GFLC}
DEVICE_KIND_OF = {v: k for k, v in DEVICE_BASE_KIND.items()}


@dataclass(eq=False)
class FeatureMatrix:
    """A T x D sequence of per-frame feature vectors, tagged with its kind."""

    kind: FeatureKind
    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError("feature data must be two-dimensional (frames x dims)")
        if not np.all(np.isfinite(data)):
            raise ValueError("feature data must be finite")
        self.kind = FeatureKind(self.kind)
        self.data = data

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def quantize_rows(rows: np.ndarray) -> np.ndarray:
    """Round values through the float32 grid used by the file payload.

    Extraction outputs pass through this so in-memory pipelines match
    file-mediated ones bit for bit.
    """
    return rows.astype(np.float32).astype(np.float64)


def write_features(m: FeatureMatrix, path: str | Path) -> None:
    header = _HEADER.pack(
        FEATURE_MAGIC, FEATURE_VERSION, int(m.kind), m.num_frames, m.dim
    )
    payload = np.ascontiguousarray(m.data, dtype="<f4").tobytes()
    atomic_write_bytes(path, header + payload)


def read_features(path: str | Path) -> FeatureMatrix:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FeatureFileError(f"{path}: file shorter than header")
    magic, version, kind, t, d = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != FEATURE_VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    try:
        kind = FeatureKind(kind)
    except ValueError:
        raise FeatureFileError(f"{path}: unknown feature kind {kind}") from None
    expected = t * d * 4
    payload = raw[_HEADER.size :]
    if len(payload) != expected:
        raise FeatureFileError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    data = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(t, d)
    if not np.all(np.isfinite(data)):
        raise FeatureFileError(f"{path}: non-finite values in payload")
    return FeatureMatrix(kind=kind, data=data)
