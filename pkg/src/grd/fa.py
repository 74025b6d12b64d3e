"""Pair-shared factor model that isolates device deviations.

Each frame of a genuine/replay pair is modeled as mu + F h + eps, where h
is a low-rank factor shared by every frame of the pair (content, speaker)
and eps ~ N(0, diag(sigma)) absorbs what differs between the two sides:
the recording/playback channel and noise. EM estimates F and sigma with
mu held fixed at the global training mean. Subtracting the shared-factor
reconstruction mu + F E[h] from an utterance leaves the device residual,
which is the extracted device feature.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FeatureFileError
from .features import DEVICE_KIND_OF, FeatureKind, FeatureMatrix, quantize_rows
from .ioutil import atomic_write_bytes
from .rng import derive_rng

VARIANCE_FLOOR = 1e-6
FA_MAGIC = b"GFAM"
FA_VERSION = 1
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class FaModel:
    """Parameters of the pair-shared factor model."""

    mu: np.ndarray
    f: np.ndarray
    sigma: np.ndarray
    #: total log-likelihood at the start of each training iteration
    log_likelihoods: list[float] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.f = np.asarray(self.f, dtype=np.float64)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        d = self.mu.shape[0]
        if self.f.ndim != 2 or self.f.shape[0] != d or self.sigma.shape != (d,):
            raise ValueError("inconsistent model shapes")
        if not 1 <= self.rank <= d:
            raise ValueError("factor rank must satisfy 1 <= rank <= dim")
        if not np.all(np.isfinite(self.mu)) or not np.all(np.isfinite(self.f)):
            raise ValueError("model parameters must be finite")
        if not np.all(self.sigma >= VARIANCE_FLOOR):
            raise ValueError(f"sigma entries must be >= {VARIANCE_FLOOR}")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    @property
    def rank(self) -> int:
        return self.f.shape[1]


@dataclass(frozen=True)
class Posterior:
    """Gaussian posterior of the shared factor given a stack of frames."""

    mean: np.ndarray
    covariance: np.ndarray

    @property
    def second_moment(self) -> np.ndarray:
        return self.covariance + np.outer(self.mean, self.mean)


@dataclass(frozen=True)
class ParallelPair:
    """A genuine feature sequence and its replayed counterpart."""

    genuine: FeatureMatrix
    replay: FeatureMatrix

    def __post_init__(self):
        if self.genuine.dim != self.replay.dim:
            raise ValueError("pair members must share the feature dimension")
        if self.genuine.num_frames == 0 or self.replay.num_frames == 0:
            raise ValueError("pair members must be nonempty")

    def stacked(self) -> np.ndarray:
        return np.vstack([self.genuine.data, self.replay.data])


def compute_global_mean(matrices: list[FeatureMatrix]) -> np.ndarray:
    """Frame-weighted mean over all frames of all utterances."""
    total = 0
    acc = None
    for m in matrices:
        if acc is None:
            acc = np.zeros(m.dim)
        acc += m.data.sum(axis=0)
        total += m.num_frames
    if acc is None or total == 0:
        raise ValueError("cannot average an empty corpus")
    return acc / total


def _posterior_from_stats(count: int, centered_sum: np.ndarray, model: FaModel) -> Posterior:
    # With F stacked once per frame and block-diagonal sigma, the precision
    # collapses to I + count * F^T Sigma^-1 F and the projected statistic to
    # F^T Sigma^-1 sum_r(phi_r - mu).
    ft_isig = (model.f / model.sigma[:, None]).T
    precision = np.eye(model.rank) + count * (ft_isig @ model.f)
    covariance = np.linalg.inv(precision)
    covariance = 0.5 * (covariance + covariance.T)
    mean = covariance @ (ft_isig @ centered_sum)
    return Posterior(mean=mean, covariance=covariance)


def e_step(pair_frames: np.ndarray, model: FaModel) -> Posterior:
    """Posterior of the shared factor for a stack of frames (one h per stack)."""
    frames = np.asarray(pair_frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] < 1:
        raise ValueError("need at least one stacked frame")
    if frames.shape[1] != model.dim:
        raise ValueError("frame dimension does not match model")
    centered_sum = (frames - model.mu).sum(axis=0)
    return _posterior_from_stats(frames.shape[0], centered_sum, model)


def _pair_log_likelihood(
    count: int, centered_sum: np.ndarray, sq_sum: np.ndarray, model: FaModel
) -> float:
    # Marginal likelihood of a stack under N(mu_hat, A_hat A_hat^T + Sigma_hat),
    # evaluated through the Woodbury identity and determinant lemma.
    ft_isig = (model.f / model.sigma[:, None]).T
    precision = np.eye(model.rank) + count * (ft_isig @ model.f)
    projected = ft_isig @ centered_sum
    solve = np.linalg.solve(precision, projected)
    quad = float(np.sum(sq_sum / model.sigma)) - float(projected @ solve)
    sign, logdet = np.linalg.slogdet(precision)
    if sign <= 0:
        raise np.linalg.LinAlgError("posterior precision not positive definite")
    log_det_cov = count * float(np.sum(np.log(model.sigma))) + logdet
    return -0.5 * (count * model.dim * _LOG_2PI + log_det_cov + quad)


def _m_step_from_stats(
    stats: list[tuple[int, np.ndarray, np.ndarray]],
    posteriors: list[Posterior],
    rank: int,
) -> tuple[np.ndarray, np.ndarray]:
    dim = stats[0][1].shape[0]
    cross = np.zeros((dim, rank))
    moment = np.zeros((rank, rank))
    sq_total = np.zeros(dim)
    total = 0
    for (count, centered_sum, sq_sum), post in zip(stats, posteriors):
        cross += np.outer(centered_sum, post.mean)
        moment += count * post.second_moment
        sq_total += sq_sum
        total += count
    try:
        f_new = np.linalg.solve(moment, cross.T).T
    except np.linalg.LinAlgError:
        warnings.warn("singular factor accumulator; regularizing")
        f_new = np.linalg.solve(moment + 1e-8 * np.eye(rank), cross.T).T
    sigma_new = (sq_total - np.sum(f_new * cross, axis=1)) / total
    return f_new, np.maximum(sigma_new, VARIANCE_FLOOR)


def _stack_stats(frames: np.ndarray, mu: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    centered = frames - mu
    return frames.shape[0], centered.sum(axis=0), (centered**2).sum(axis=0)


def m_step(
    pairs: list[tuple[np.ndarray, Posterior]], mu: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Update F and sigma from stacked frames and their posteriors."""
    if not pairs:
        raise ValueError("m_step needs at least one pair")
    mu = np.asarray(mu, dtype=np.float64)
    stats = [_stack_stats(np.asarray(frames, dtype=np.float64), mu) for frames, _ in pairs]
    posteriors = [post for _, post in pairs]
    return _m_step_from_stats(stats, posteriors, posteriors[0].mean.shape[0])


def train_fa(
    pairs: list[ParallelPair], rank: int = 10, iters: int = 20, seed: int = 0
) -> FaModel:
    """EM training of the factor model on aligned parallel pairs.

    mu is the global mean of all pair frames and stays fixed; F starts from
    a seeded normal draw scaled by 0.1 and sigma from the per-dimension data
    variance. The total log-likelihood at the start of each iteration is
    recorded on the returned model.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    if not pairs:
        raise ValueError("need at least one pair")
    dim = pairs[0].genuine.dim
    if any(p.genuine.dim != dim for p in pairs):
        raise ValueError("all pairs must share the feature dimension")
    if not 1 <= rank <= dim:
        raise ValueError("factor rank must satisfy 1 <= rank <= dim")

    stacks = [p.stacked() for p in pairs]
    mu = compute_global_mean([p.genuine for p in pairs] + [p.replay for p in pairs])
    stats = [_stack_stats(s, mu) for s in stacks]
    total = sum(count for count, _, _ in stats)
    variance = sum(sq for _, _, sq in stats) / total

    rng = derive_rng(seed, "fa-init")
    f = 0.1 * rng.standard_normal((dim, rank))
    sigma = np.maximum(variance, VARIANCE_FLOOR)

    history: list[float] = []
    for _ in range(iters):
        model = FaModel(mu=mu, f=f, sigma=sigma)
        posteriors = []
        loglik = 0.0
        for count, centered_sum, sq_sum in stats:
            posteriors.append(_posterior_from_stats(count, centered_sum, model))
            loglik += _pair_log_likelihood(count, centered_sum, sq_sum, model)
        history.append(loglik)
        f, sigma = _m_step_from_stats(stats, posteriors, rank)

    return FaModel(mu=mu, f=f, sigma=sigma, log_likelihoods=history)


def extract_device_feature(m: FeatureMatrix, model: FaModel) -> FeatureMatrix:
    """Remove the shared-factor reconstruction from every frame.

    The factor posterior is computed from the utterance's own frames (all
    frames share one h), then each row becomes phi - mu - F E[h].
    """
    if m.kind not in DEVICE_KIND_OF:
        raise ValueError(f"device features are derived from GFCC/GFLC, not {m.kind.name}")
    if m.dim != model.dim:
        raise ValueError("feature dimension does not match model")
    posterior = e_step(m.data, model)
    rows = m.data - model.mu - model.f @ posterior.mean
    return FeatureMatrix(kind=DEVICE_KIND_OF[m.kind], data=quantize_rows(rows))


_FA_HEADER = struct.Struct("<4sIII")


def save_fa_model(model: FaModel, path: str | Path) -> None:
    header = _FA_HEADER.pack(FA_MAGIC, FA_VERSION, model.dim, model.rank)
    body = b"".join(
        np.ascontiguousarray(a, dtype="<f8").tobytes()
        for a in (model.mu, model.f, model.sigma)
    )
    atomic_write_bytes(path, header + body)


def load_fa_model(path: str | Path) -> FaModel:
    raw = Path(path).read_bytes()
    if len(raw) < _FA_HEADER.size:
        raise FeatureFileError(f"{path}: file shorter than header")
    magic, version, dim, rank = _FA_HEADER.unpack_from(raw)
    if magic != FA_MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != FA_VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    expected = (dim + dim * rank + dim) * 8
    body = raw[_FA_HEADER.size :]
    if len(body) != expected:
        raise FeatureFileError(f"{path}: payload has {len(body)} bytes, expected {expected}")
    values = np.frombuffer(body, dtype="<f8")
    mu = values[:dim].copy()
    f = values[dim : dim + dim * rank].reshape(dim, rank).copy()
    sigma = values[dim + dim * rank :].copy()
    return FaModel(mu=mu, f=f, sigma=sigma)
