"""Synthetic parallel replay corpus for desk-scale experiments.

Genuine utterances are harmonic stacks with per-utterance random pitch,
spectral envelope and amplitude modulation, plus a faint noise floor.
A replay passes the genuine signal through a random FIR channel (direct
tap plus decaying random reflections) and adds white noise at a target
SNR, imitating a record-and-playback chain. Training pairs share content
between the genuine and replayed sides; the evaluation split uses fresh
content and channels drawn from streams disjoint from the training ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioSignal, write_wav
from .protocol import Label, ProtocolEntry, write_protocol
from .ioutil import atomic_write_text
from .rng import derive_rng


@dataclass(frozen=True)
class SyntheticReplaySpec:
    n_pairs: int
    ir_length: int = 64
    snr_db: float = 20.0
    n_eval: int = 0
    sample_rate: int = 16000
    duration: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("n_pairs must be at least 1")
        if self.ir_length < 1:
            raise ValueError("ir_length must be at least 1")
        if self.n_eval < 0:
            raise ValueError("n_eval must be nonnegative")
        if self.sample_rate < 1 or self.duration <= 0:
            raise ValueError("sample_rate and duration must be positive")

    @property
    def n_samples(self) -> int:
        return int(round(self.sample_rate * self.duration))


@dataclass(frozen=True)
class SynthPair:
    """Float components of one genuine/replay pair before PCM quantization."""

    genuine: np.ndarray
    clean_replay: np.ndarray
    noise: np.ndarray
    ir: np.ndarray

    @property
    def replay(self) -> np.ndarray:
        return np.clip(self.clean_replay + self.noise, -1.0, 1.0)


@dataclass(frozen=True)
class CorpusPaths:
    root: Path
    wav_dir: Path
    train_protocol: Path
    eval_protocol: Path
    train_manifest: Path
    eval_manifest: Path


def harmonic_utterance(rng: np.random.Generator, n_samples: int, sample_rate: int) -> np.ndarray:
    """One random voiced-like signal: harmonics under a random envelope.

    Pitch, spectral tilt, resonances, amplitude modulation and the
    recording noise floor all vary per utterance, so content variability
    dominates the raw cepstra the way speaker/content variation would.
    """
    f0 = rng.uniform(90.0, 320.0)
    tilt_db_per_oct = rng.uniform(-12.0, 6.0)
    n_res = 3
    res_center = rng.uniform(np.log(200.0), np.log(0.4 * sample_rate), size=n_res)
    res_width = rng.uniform(0.3, 0.9, size=n_res)
    res_gain = rng.uniform(-10.0, 10.0, size=n_res)

    t = np.arange(n_samples) / sample_rate
    sig = np.zeros(n_samples)
    k = 1
    while k * f0 < 0.45 * sample_rate:
        freq = k * f0
        gain_db = tilt_db_per_oct * math.log2(freq / f0)
        gain_db += np.sum(res_gain * np.exp(-0.5 * ((np.log(freq) - res_center) / res_width) ** 2))
        amp = (1.0 / k) * 10.0 ** (gain_db / 20.0)
        sig += amp * np.sin(2.0 * np.pi * freq * t + rng.uniform(0.0, 2.0 * np.pi))
        k += 1

    envelope = np.full(n_samples, 0.05)
    for _ in range(rng.integers(2, 5)):
        center = rng.uniform(0.1, 0.9) * n_samples
        width = rng.uniform(0.08, 0.25) * sample_rate
        offsets = np.arange(n_samples) - center
        bump = np.where(np.abs(offsets) < width, 0.5 * (1 + np.cos(np.pi * offsets / width)), 0.0)
        envelope = np.maximum(envelope, bump)
    sig *= envelope

    # recording noise floor, randomized so it is not a clean class cue
    rms = np.sqrt(np.mean(sig**2))
    noise_snr_db = rng.uniform(22.0, 34.0)
    sig += rng.standard_normal(n_samples) * (rms / 10.0 ** (noise_snr_db / 20.0))
    peak = np.max(np.abs(sig))
    if peak > 0:
        sig *= 0.7 / peak
    return sig


def random_channel(rng: np.random.Generator, ir_length: int) -> np.ndarray:
    """Random unit-energy FIR replay channel; length 1 is the identity."""
    ir = np.zeros(ir_length)
    ir[0] = 1.0
    if ir_length > 1:
        lags = np.arange(1, ir_length)
        decay = np.exp(-lags / max(ir_length / 3.0, 1.0))
        ir[1:] = 0.7 * decay * rng.standard_normal(ir_length - 1)
    return ir / np.linalg.norm(ir)


def replay_through(
    genuine: np.ndarray, ir: np.ndarray, snr_db: float, rng: np.random.Generator
) -> SynthPair:
    """Convolve with the channel and add white noise at the requested SNR."""
    clean = np.convolve(genuine, ir)[: len(genuine)]
    if math.isinf(snr_db):
        noise = np.zeros_like(clean)
    else:
        power = np.mean(clean**2)
        sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
        noise = sigma * rng.standard_normal(len(clean))
    return SynthPair(genuine=genuine, clean_replay=clean, noise=noise, ir=ir)


def _write(path: Path, samples: np.ndarray, rate: int) -> None:
    write_wav(path, AudioSignal(samples=samples, sample_rate=rate))


def generate_corpus(spec: SyntheticReplaySpec, out_dir: str | Path) -> CorpusPaths:
    """Write WAVs, protocols and manifests for one synthetic experiment."""
    root = Path(out_dir)
    wav_dir = root / "wav"
    wav_dir.mkdir(parents=True, exist_ok=True)
    rate = spec.sample_rate
    seed = spec.seed

    train_entries: list[ProtocolEntry] = []
    train_paths: list[Path] = []
    for i in range(spec.n_pairs):
        genuine = harmonic_utterance(derive_rng(seed, "train-content", i), spec.n_samples, rate)
        ir = random_channel(derive_rng(seed, "train-channel", i), spec.ir_length)
        pair = replay_through(genuine, ir, spec.snr_db, derive_rng(seed, "train-noise", i))
        gid, rid, pid = f"tr{i:04d}g", f"tr{i:04d}r", f"p{i:04d}"
        _write(wav_dir / f"{gid}.wav", pair.genuine, rate)
        _write(wav_dir / f"{rid}.wav", pair.replay, rate)
        train_entries.append(ProtocolEntry(gid, Label.GENUINE, pid))
        train_entries.append(ProtocolEntry(rid, Label.SPOOF, pid))
        train_paths += [wav_dir / f"{gid}.wav", wav_dir / f"{rid}.wav"]

    eval_entries: list[ProtocolEntry] = []
    eval_paths: list[Path] = []
    n_genuine = (spec.n_eval + 1) // 2
    for j in range(spec.n_eval):
        uid = f"ev{j:04d}"
        content = harmonic_utterance(derive_rng(seed, "eval-content", j), spec.n_samples, rate)
        if j < n_genuine:
            _write(wav_dir / f"{uid}.wav", content, rate)
            eval_entries.append(ProtocolEntry(uid, Label.GENUINE))
        else:
            ir = random_channel(derive_rng(seed, "eval-channel", j), spec.ir_length)
            pair = replay_through(content, ir, spec.snr_db, derive_rng(seed, "eval-noise", j))
            _write(wav_dir / f"{uid}.wav", pair.replay, rate)
            eval_entries.append(ProtocolEntry(uid, Label.SPOOF))
        eval_paths.append(wav_dir / f"{uid}.wav")

    paths = CorpusPaths(
        root=root,
        wav_dir=wav_dir,
        train_protocol=root / "train.protocol",
        eval_protocol=root / "eval.protocol",
        train_manifest=root / "train.manifest",
        eval_manifest=root / "eval.manifest",
    )
    write_protocol(train_entries, paths.train_protocol)
    write_protocol(eval_entries, paths.eval_protocol)
    atomic_write_text(paths.train_manifest, "".join(f"{p}\n" for p in train_paths))
    atomic_write_text(paths.eval_manifest, "".join(f"{p}\n" for p in eval_paths))
    return paths
