"""Command-line front-end.

Subcommands: synth-replay, extract, align, train-fa, train-gmm, score,
eval. Exit codes: 0 success, 1 runtime error, 2 usage error. The GRD_LOG
environment variable (debug/info/warning/error) controls verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import alignment, fa, gmm, metrics
from .config import PipelineConfig, load_config
from .errors import GrdError
from .features import FeatureKind, read_features
from .audio import read_wav
from .ioutil import atomic_write_text
from .pipeline import extract_utterance, extract_wav_to_file
from .protocol import Label, paired_entries, parse_protocol
from .rng import derive_seed
from .synth import SyntheticReplaySpec, generate_corpus

log = logging.getLogger("grd")

_FEATURE_NAMES = {kind.name.lower(): kind for kind in FeatureKind}
_DEVICE_FEATURES = (FeatureKind.GFDCC, FeatureKind.GFLDC)


def _setup_logging() -> None:
    level = os.environ.get("GRD_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_cfg(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig().validate()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _feature_kind(name: str) -> FeatureKind:
    return _FEATURE_NAMES[name]


def _snr(value: str) -> float:
    return float("inf") if value.lower() in ("inf", "infinity") else float(value)


def cmd_synth_replay(args: argparse.Namespace) -> int:
    spec = SyntheticReplaySpec(
        n_pairs=args.n_pairs,
        ir_length=args.ir_length,
        snr_db=args.snr_db,
        n_eval=args.n_eval,
        sample_rate=args.sample_rate,
        duration=args.duration,
        seed=args.seed if args.seed is not None else 0,
    )
    paths = generate_corpus(spec, args.out)
    log.info("synthetic corpus written under %s", paths.root)
    return 0


def cmd_extract(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    kind = _feature_kind(args.feature)
    if kind in _DEVICE_FEATURES and not args.fa_model:
        parser.error(f"--feature {args.feature} requires --fa-model")
    if bool(args.input) == bool(args.manifest):
        parser.error("exactly one of --in or --manifest is required")
    cfg = _load_cfg(args)
    fa_model = fa.load_fa_model(args.fa_model) if args.fa_model else None

    if args.input:
        extract_wav_to_file(args.input, args.out, kind, cfg, fa_model)
        return 0

    wavs = [
        Path(line.strip())
        for line in Path(args.manifest).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(wav: Path) -> None:
        extract_wav_to_file(wav, out_dir / (wav.stem + ".feat"), kind, cfg, fa_model)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        list(pool.map(one, wavs))
    log.info("extracted %d feature files into %s", len(wavs), out_dir)
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    g = read_features(args.genuine)
    s = read_features(args.spoof)
    path = alignment.dtw_align(g, s)
    g2, s2 = alignment.expand_along_path(g, s, path)
    from .features import write_features

    write_features(g2, args.out_genuine)
    write_features(s2, args.out_spoof)
    log.info("aligned to %d steps, total cost %.6f", len(path.steps), path.total_cost)
    return 0


def _base_features_for(
    entries, wav_dir: Path, kind: FeatureKind, cfg: PipelineConfig
) -> dict[str, "fa.FeatureMatrix"]:
    out = {}
    for e in entries:
        sig = read_wav(wav_dir / f"{e.utterance_id}.wav")
        out[e.utterance_id] = extract_utterance(sig, kind, cfg)
    return out


def cmd_train_fa(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    kind = _feature_kind(args.feature)
    entries = parse_protocol(args.protocol)
    pairs = paired_entries(entries)
    if not pairs:
        raise GrdError("no usable genuine/replay pairs in the protocol")

    # device modeling happens before CMVN, so base features are extracted raw
    raw_cfg = PipelineConfig(**{**cfg.__dict__, "cmvn": False})
    wav_dir = Path(args.wav_dir)
    feats = _base_features_for(
        [e for pair in pairs for e in pair], wav_dir, kind, raw_cfg
    )

    parallel = []
    for gen_e, spf_e in pairs:
        g, s = feats[gen_e.utterance_id], feats[spf_e.utterance_id]
        path = alignment.dtw_align(g, s)
        g2, s2 = alignment.expand_along_path(g, s, path)
        parallel.append(fa.ParallelPair(genuine=g2, replay=s2))

    model = fa.train_fa(parallel, rank=cfg.fa_rank, iters=cfg.fa_iters, seed=cfg.seed)
    for it, value in enumerate(model.log_likelihoods or [], start=1):
        log.info("fa iteration %d loglik %.6f", it, value)
    fa.save_fa_model(model, args.out)
    log.info("factor model (dim %d, rank %d) written to %s", model.dim, model.rank, args.out)
    return 0


def cmd_train_gmm(args: argparse.Namespace) -> int:
    import numpy as np

    cfg = _load_cfg(args)
    entries = parse_protocol(args.protocol)
    feat_dir = Path(args.feat_dir)
    pools = {Label.GENUINE: [], Label.SPOOF: []}
    for e in entries:
        pools[e.label].append(read_features(feat_dir / f"{e.utterance_id}.feat").data)
    for label, mats in pools.items():
        if not mats:
            raise GrdError(f"protocol has no {label.value} utterances")

    outputs = {Label.GENUINE: args.gmm_genuine, Label.SPOOF: args.gmm_spoof}
    for label, mats in pools.items():
        data = np.vstack(mats)
        seed = derive_seed(cfg.seed, "gmm", label.value)
        model = gmm.gmm_em_train(data, cfg.gmm_components, iters=cfg.gmm_iters, seed=seed)
        for it, value in enumerate(model.log_likelihoods or [], start=1):
            log.info("%s gmm iteration %d loglik %.6f", label.value, it, value)
        gmm.save_gmm(model, outputs[label])
        log.info("%s gmm (%d components) written to %s", label.value, model.n_components, outputs[label])
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    genuine_model = gmm.load_gmm(args.gmm_genuine)
    spoof_model = gmm.load_gmm(args.gmm_spoof)
    entries = parse_protocol(args.protocol)
    feat_dir = Path(args.feat_dir)

    def one(entry) -> tuple[str, float]:
        m = read_features(feat_dir / f"{entry.utterance_id}.feat")
        return entry.utterance_id, gmm.score_llr(genuine_model, spoof_model, m)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = list(pool.map(one, entries))
    metrics.write_scores(rows, args.out)
    log.info("%d scores written to %s", len(rows), args.out)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    entries = parse_protocol(args.protocol)
    scores = dict(metrics.read_scores(args.scores))
    missing = [e.utterance_id for e in entries if e.utterance_id not in scores]
    if missing:
        raise GrdError(f"missing scores for {len(missing)} utterances (first: {missing[0]})")
    trials = [(scores[e.utterance_id], e.label) for e in entries]
    report = metrics.format_report(metrics.compute_eer(trials))
    print(report)
    if args.out:
        atomic_write_text(args.out, report + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grd",
        description="Graph-frequency cepstral features and a GMM back-end "
        "for replay speech detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth-replay", help="generate a synthetic parallel replay corpus")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--n-pairs", type=int, required=True)
    sp.add_argument("--n-eval", type=int, default=0)
    sp.add_argument("--ir-length", type=int, default=64)
    sp.add_argument("--snr-db", type=_snr, default=20.0, help="replay noise SNR; 'inf' disables noise")
    sp.add_argument("--sample-rate", type=int, default=16000)
    sp.add_argument("--duration", type=float, default=1.0, help="utterance length in seconds")
    sp.add_argument("--seed", type=int, default=0)

    ex = sub.add_parser("extract", help="extract features from WAV files")
    ex.add_argument("--feature", required=True, choices=sorted(_FEATURE_NAMES))
    ex.add_argument("--config", help="key=value config file")
    ex.add_argument("--in", dest="input", help="single input WAV")
    ex.add_argument("--manifest", help="text file with one WAV path per line")
    ex.add_argument("--out", required=True, help="output .feat file (--in) or directory (--manifest)")
    ex.add_argument("--fa-model", help="factor model, required for gfdcc/gfldc")
    ex.add_argument("--seed", type=int)
    ex.add_argument("--jobs", type=int, default=1)

    al = sub.add_parser("align", help="warp a genuine/replay feature pair to equal length")
    al.add_argument("--genuine", required=True)
    al.add_argument("--spoof", required=True)
    al.add_argument("--out-genuine", required=True)
    al.add_argument("--out-spoof", required=True)

    tf = sub.add_parser("train-fa", help="train the device factor model on parallel pairs")
    tf.add_argument("--config", help="key=value config file")
    tf.add_argument("--protocol", required=True, help="protocol with pair ids")
    tf.add_argument("--wav-dir", required=True)
    tf.add_argument("--feature", required=True, choices=["gfcc", "gflc"])
    tf.add_argument("--out", required=True, help="output model file")
    tf.add_argument("--seed", type=int)

    tg = sub.add_parser("train-gmm", help="train per-class mixtures from feature files")
    tg.add_argument("--config", help="key=value config file")
    tg.add_argument("--protocol", required=True)
    tg.add_argument("--feat-dir", required=True)
    tg.add_argument("--gmm-genuine", required=True, help="output genuine model file")
    tg.add_argument("--gmm-spoof", required=True, help="output spoof model file")
    tg.add_argument("--seed", type=int)

    sc = sub.add_parser("score", help="score trials against the two class mixtures")
    sc.add_argument("--gmm-genuine", required=True)
    sc.add_argument("--gmm-spoof", required=True)
    sc.add_argument("--protocol", required=True)
    sc.add_argument("--feat-dir", required=True)
    sc.add_argument("--out", required=True, help="output score file")
    sc.add_argument("--jobs", type=int, default=1)

    ev = sub.add_parser("eval", help="report the equal error rate of a score file")
    ev.add_argument("--scores", required=True)
    ev.add_argument("--protocol", required=True)
    ev.add_argument("--out", help="optional report file")

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "synth-replay": lambda: cmd_synth_replay(args),
        "extract": lambda: cmd_extract(args, parser),
        "align": lambda: cmd_align(args),
        "train-fa": lambda: cmd_train_fa(args),
        "train-gmm": lambda: cmd_train_gmm(args),
        "score": lambda: cmd_score(args),
        "eval": lambda: cmd_eval(args),
    }
    try:
        return handlers[args.command]()
    except (GrdError, OSError, ValueError) as exc:
        log.error("%s", exc)
        print(f"grd: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
