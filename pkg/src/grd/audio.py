"""WAV ingestion, framing and windowing.

The reader handles RIFF/WAVE files carrying 16-bit integer PCM or 32-bit
IEEE float samples, mono or multichannel (channel 0 is kept). Integer PCM
is scaled by 1/32768 so the full negative range maps to -1.0. The writer
emits mono 16-bit PCM and is the inverse used by the synthetic corpus
generator.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import AudioFormatError, UnsupportedAudioError
from .ioutil import atomic_write_bytes

PCM16_SCALE = 32768.0

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


class Window(Enum):
    RECTANGULAR = "rectangular"
    HAMMING = "hamming"


@dataclass(frozen=True)
class AudioSignal:
    """A mono signal with amplitudes in [-1, 1] and its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class FrameConfig:
    """Short-term analysis parameters: frame length, hop and window."""

    frame_len: int = 512
    hop: int = 256
    window: Window = Window.HAMMING

    def __post_init__(self):
        if self.frame_len < 1:
            raise ValueError("frame_len must be positive")
        if not 0 < self.hop <= self.frame_len:
            raise ValueError("hop must satisfy 0 < hop <= frame_len")


def window_curve(window: Window, n: int) -> np.ndarray:
    if window is Window.HAMMING:
        return np.hamming(n)
    return np.ones(n)


def read_wav(path: str | Path) -> AudioSignal:
    """Read a RIFF/WAVE file and return channel 0 as an AudioSignal.

    Raises AudioFormatError for malformed files and UnsupportedAudioError
    for encodings other than 16-bit PCM / 32-bit float.
    """
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    offset = 12
    while offset + 8 <= len(raw):
        chunk_id = raw[offset : offset + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, offset + 4)
        body = raw[offset + 8 : offset + 8 + chunk_size]
        if len(body) < chunk_size:
            raise AudioFormatError(f"{path}: truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            data = body
        offset += 8 + chunk_size + (chunk_size & 1)

    if fmt is None or data is None:
        raise AudioFormatError(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise AudioFormatError(f"{path}: fmt chunk too short")

    audio_format, channels, sample_rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt
    )
    if channels < 1:
        raise AudioFormatError(f"{path}: zero channels")
    if sample_rate <= 0:
        raise AudioFormatError(f"{path}: invalid sample rate {sample_rate}")

    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        dtype = np.dtype("<i2")
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype = np.dtype("<f4")
    else:
        raise UnsupportedAudioError(
            f"{path}: unsupported encoding (format={audio_format}, bits={bits})"
        )

    frame_bytes = channels * dtype.itemsize
    if block_align not in (0, frame_bytes) or len(data) % frame_bytes != 0:
        raise AudioFormatError(f"{path}: data size does not match sample layout")

    values = np.frombuffer(data, dtype=dtype).reshape(-1, channels)[:, 0]
    if dtype.kind == "i":
        samples = values.astype(np.float64) / PCM16_SCALE
    else:
        samples = values.astype(np.float64)
        if not np.all(np.isfinite(samples)):
            raise AudioFormatError(f"{path}: non-finite float samples")
    return AudioSignal(samples=samples, sample_rate=int(sample_rate))


def write_wav(path: str | Path, sig: AudioSignal) -> None:
    """Write a mono 16-bit PCM WAV file (clipping to [-1, 1])."""
    clipped = np.clip(sig.samples, -1.0, 1.0)
    pcm = np.clip(np.rint(clipped * PCM16_SCALE), -32768, 32767).astype("<i2")
    payload = pcm.tobytes()
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack(
                "<IHHIIHH",
                16,
                _WAVE_FORMAT_PCM,
                1,
                sig.sample_rate,
                sig.sample_rate * 2,
                2,
                16,
            ),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    atomic_write_bytes(path, header + payload)


def frame_signal(sig: AudioSignal, cfg: FrameConfig) -> np.ndarray:
    """Slice a signal into windowed frames of shape (num_frames, frame_len).

    Frame t covers samples [t*hop, t*hop + frame_len); a trailing partial
    frame is dropped.
    """
    n = cfg.frame_len
    if len(sig) < n:
        raise ValueError(f"signal has {len(sig)} samples, shorter than one frame ({n})")
    windows = np.lib.stride_tricks.sliding_window_view(sig.samples, n)[:: cfg.hop]
    return windows * window_curve(cfg.window, n)
