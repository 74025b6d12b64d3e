"""Per-utterance extraction wiring shared by the CLI commands.

Device kinds (GFDCC, GFLDC) are derived from their base cepstral kind
without CMVN, transformed by the factor model, and only then CMVN is
applied if configured; base kinds go straight through extract_features.
"""

from __future__ import annotations

from pathlib import Path

from .audio import AudioSignal, read_wav
from .cepstral import cmvn, extract_features
from .config import PipelineConfig
from .fa import FaModel, extract_device_feature
from .features import DEVICE_BASE_KIND, FeatureKind, FeatureMatrix, write_features


def extract_utterance(
    sig: AudioSignal,
    kind: FeatureKind,
    cfg: PipelineConfig,
    fa_model: FaModel | None = None,
) -> FeatureMatrix:
    base_kind = DEVICE_BASE_KIND.get(kind, kind)
    if base_kind is kind:
        return extract_features(
            sig, kind, cfg.frame_config(), cfg.graph_spec(), cfg.cepstral_config(),
            apply_cmvn=cfg.cmvn,
        )
    if fa_model is None:
        raise ValueError(f"{kind.name} extraction requires a trained factor model")
    base = extract_features(
        sig, base_kind, cfg.frame_config(), cfg.graph_spec(), cfg.cepstral_config(),
        apply_cmvn=False,
    )
    out = extract_device_feature(base, fa_model)
    if cfg.cmvn:
        out = cmvn(out)
    return out


def extract_wav_to_file(
    wav_path: str | Path,
    out_path: str | Path,
    kind: FeatureKind,
    cfg: PipelineConfig,
    fa_model: FaModel | None = None,
) -> None:
    m = extract_utterance(read_wav(wav_path), kind, cfg, fa_model)
    write_features(m, out_path)
