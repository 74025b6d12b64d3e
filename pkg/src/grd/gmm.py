"""Diagonal-covariance Gaussian mixture back-end.

One mixture is trained per class (genuine, spoof); a trial is scored by
the per-frame average log-likelihood ratio between the two. Densities are
evaluated through log-sum-exp and variances are floored, so finite input
never produces NaN or -inf.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FeatureFileError
from .features import FeatureMatrix
from .ioutil import atomic_write_bytes
from .rng import derive_rng

VARIANCE_FLOOR = 1e-6
STARVATION_THRESHOLD = 1e-8
INIT_SUBSAMPLE = 100_000
GMM_MAGIC = b"GFGM"
GMM_VERSION = 1
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    #: total log-likelihood at the start of each training iteration
    log_likelihoods: list[float] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.means = np.asarray(self.means, dtype=np.float64)
        self.variances = np.asarray(self.variances, dtype=np.float64)
        k = self.weights.shape[0]
        if self.means.shape[0] != k or self.variances.shape != self.means.shape:
            raise ValueError("inconsistent mixture shapes")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1.0) >= 1e-9:
            raise ValueError("weights must be positive and sum to 1")
        if np.any(self.variances < VARIANCE_FLOOR):
            raise ValueError(f"variances must be >= {VARIANCE_FLOOR}")

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def _component_log_prob(model: GmmModel, data: np.ndarray) -> np.ndarray:
    """log(w_k) + log N(x; mean_k, diag var_k) for every frame/component."""
    inv_var = 1.0 / model.variances
    const = (
        np.log(model.weights)
        - 0.5 * (model.dim * _LOG_2PI + np.log(model.variances).sum(axis=1))
        - 0.5 * np.sum(model.means**2 * inv_var, axis=1)
    )
    quad = -0.5 * (data**2) @ inv_var.T + data @ (model.means * inv_var).T
    return quad + const


def _log_sum_exp(rows: np.ndarray) -> np.ndarray:
    peak = rows.max(axis=1)
    return peak + np.log(np.exp(rows - peak[:, None]).sum(axis=1))


def gmm_log_likelihood(model: GmmModel, frame: np.ndarray) -> float:
    """Log density of one frame under the mixture."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != (model.dim,):
        raise ValueError("frame dimension does not match model")
    return float(_log_sum_exp(_component_log_prob(model, frame[None, :]))[0])


def _kmeans_pp_centers(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty((k, data.shape[1]))
    centers[0] = data[rng.integers(len(data))]
    dist2 = np.sum((data - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = dist2.sum()
        if total > 0:
            probs = dist2 / total
            idx = rng.choice(len(data), p=probs)
        else:
            idx = rng.integers(len(data))
        centers[i] = data[idx]
        dist2 = np.minimum(dist2, np.sum((data - centers[i]) ** 2, axis=1))
    return centers


def gmm_init(data: np.ndarray, n_components: int, seed: int = 0) -> GmmModel:
    """Seed a mixture with k-means++ centers and within-cluster statistics."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be (frames, dims)")
    if len(data) < n_components:
        raise ValueError(f"{len(data)} frames cannot seed {n_components} components")

    rng = derive_rng(seed, "gmm-init")
    sample = data
    if len(sample) > INIT_SUBSAMPLE:
        sample = data[rng.choice(len(data), INIT_SUBSAMPLE, replace=False)]

    centers = _kmeans_pp_centers(sample, n_components, rng)
    d2 = (
        np.sum(sample**2, axis=1)[:, None]
        - 2.0 * sample @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    assign = d2.argmin(axis=1)

    global_var = np.maximum(sample.var(axis=0), VARIANCE_FLOOR)
    means = np.empty_like(centers)
    variances = np.empty_like(centers)
    counts = np.empty(n_components)
    for k in range(n_components):
        members = sample[assign == k]
        counts[k] = max(len(members), 1)
        if len(members) == 0:
            means[k] = centers[k]
            variances[k] = global_var
        else:
            means[k] = members.mean(axis=0)
            variances[k] = np.maximum(members.var(axis=0), VARIANCE_FLOOR)
    weights = counts / counts.sum()
    return GmmModel(weights=weights, means=means, variances=variances)


def _responsibilities(model: GmmModel, data: np.ndarray) -> tuple[np.ndarray, float]:
    log_prob = _component_log_prob(model, data)
    totals = _log_sum_exp(log_prob)
    return np.exp(log_prob - totals[:, None]), float(totals.sum())


def _m_step(
    data: np.ndarray, resp: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mass = resp.sum(axis=0)
    starving = np.nonzero(mass < STARVATION_THRESHOLD)[0]
    means = np.empty((resp.shape[1], data.shape[1]))
    variances = np.empty_like(means)
    safe_mass = np.maximum(mass, STARVATION_THRESHOLD)
    means[:] = (resp.T @ data) / safe_mass[:, None]
    second = (resp.T @ (data**2)) / safe_mass[:, None]
    variances[:] = np.maximum(second - means**2, VARIANCE_FLOOR)
    if starving.size:
        warnings.warn(f"reinitializing {starving.size} starved mixture component(s)")
        global_var = np.maximum(data.var(axis=0), VARIANCE_FLOOR)
        for k in starving:
            means[k] = data[rng.integers(len(data))]
            variances[k] = global_var
            mass[k] = 1.0
    weights = mass / mass.sum()
    return weights, means, variances


def gmm_em_train(
    data: np.ndarray, n_components: int, iters: int = 20, seed: int = 0
) -> GmmModel:
    """Standard EM from a k-means++ start; per-iteration totals recorded."""
    data = np.asarray(data, dtype=np.float64)
    if iters < 1:
        raise ValueError("iters must be at least 1")
    model = gmm_init(data, n_components, seed)
    rng = derive_rng(seed, "gmm-reinit")
    history: list[float] = []
    for _ in range(iters):
        resp, loglik = _responsibilities(model, data)
        history.append(loglik)
        weights, means, variances = _m_step(data, resp, rng)
        model = GmmModel(weights=weights, means=means, variances=variances)
    model.log_likelihoods = history
    return model


def score_llr(genuine: GmmModel, spoof: GmmModel, m: FeatureMatrix) -> float:
    """Per-frame average log-likelihood ratio, genuine minus spoof."""
    if genuine.dim != m.dim or spoof.dim != m.dim:
        raise ValueError("feature dimension does not match the models")
    if m.num_frames < 1:
        raise ValueError("cannot score an empty utterance")
    ll_g = _log_sum_exp(_component_log_prob(genuine, m.data))
    ll_s = _log_sum_exp(_component_log_prob(spoof, m.data))
    return float(np.mean(ll_g - ll_s))


_GMM_HEADER = struct.Struct("<4sIII")


def save_gmm(model: GmmModel, path: str | Path) -> None:
    header = _GMM_HEADER.pack(GMM_MAGIC, GMM_VERSION, model.n_components, model.dim)
    body = b"".join(
        np.ascontiguousarray(a, dtype="<f8").tobytes()
        for a in (model.weights, model.means, model.variances)
    )
    atomic_write_bytes(path, header + body)


def load_gmm(path: str | Path) -> GmmModel:
    raw = Path(path).read_bytes()
    if len(raw) < _GMM_HEADER.size:
        raise FeatureFileError(f"{path}: file shorter than header")
    magic, version, k, dim = _GMM_HEADER.unpack_from(raw)
    if magic != GMM_MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != GMM_VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    expected = (k + 2 * k * dim) * 8
    body = raw[_GMM_HEADER.size :]
    if len(body) != expected:
        raise FeatureFileError(f"{path}: payload has {len(body)} bytes, expected {expected}")
    values = np.frombuffer(body, dtype="<f8")
    weights = values[:k].copy()
    means = values[k : k + k * dim].reshape(k, dim).copy()
    variances = values[k + k * dim :].reshape(k, dim).copy()
    return GmmModel(weights=weights, means=means, variances=variances)
