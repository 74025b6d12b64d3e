"""Plain-text key=value pipeline configuration.

Blank lines and `#` comment lines are ignored. Unknown keys are rejected
before any work starts, and every value is validated on load.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .audio import FrameConfig, Window
from .cepstral import CepstralConfig
from .errors import ConfigError
from .graph import GraphSpec, Operator, Topology


@dataclass
class PipelineConfig:
    frame_len: int = 512
    hop: int = 256
    window: Window = Window.HAMMING
    topology: Topology = Topology.PATH
    operator: Operator = Operator.LAPLACIAN
    n_ceps: int = 60
    log_floor: float = 1e-10
    append_log_energy: bool = False
    cmvn: bool = False
    fa_rank: int = 10
    fa_iters: int = 20
    gmm_components: int = 512
    gmm_iters: int = 20
    seed: int = 0

    def frame_config(self) -> FrameConfig:
        return FrameConfig(frame_len=self.frame_len, hop=self.hop, window=self.window)

    def graph_spec(self) -> GraphSpec:
        return GraphSpec(topology=self.topology, size=self.frame_len, operator=self.operator)

    def cepstral_config(self) -> CepstralConfig:
        return CepstralConfig(
            n_ceps=self.n_ceps,
            log_floor=self.log_floor,
            append_log_energy=self.append_log_energy,
        )

    def validate(self) -> "PipelineConfig":
        try:
            self.frame_config()
            self.graph_spec()
            self.cepstral_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for key in ("fa_rank", "fa_iters", "gmm_components", "gmm_iters"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        return self


def _parse_bool(value: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise ValueError(f"expected true or false, got {value!r}")


_PARSERS = {
    int: int,
    float: float,
    bool: _parse_bool,
    Window: Window,
    Topology: Topology,
    Operator: Operator,
}


def parse_config_text(text: str, source: str = "<config>") -> PipelineConfig:
    parsers = {f.name: _PARSERS[f.default.__class__] for f in fields(PipelineConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}, line {lineno}: expected key=value, got {raw!r}")
        if key not in parsers:
            raise ConfigError(f"{source}, line {lineno}: unknown key {key!r}")
        try:
            values[key] = parsers[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}, line {lineno}: bad value for {key}: {exc}") from None
    return PipelineConfig(**values).validate()


def load_config(path: str | Path) -> PipelineConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), source=str(path))
