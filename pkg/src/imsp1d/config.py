"""Experiment configuration: nested dataclasses read from / written to an
INI-style ``key = value`` file."""
from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field
from typing import Optional

from .minimize import MinimizerConfig
from .numgrid import SpatialGrid, WavenumberGrid
from .reconstruct import MODES


class ConfigError(ValueError):
    pass


@dataclass
class GridConfig:
    h_x: float = 0.02
    k_lo: float = 0.5
    k_hi: float = 1.5
    h_k: float = 0.1
    quad_n: int = 2000
    x0_source: float = -1.0

    def spatial(self) -> SpatialGrid:
        return SpatialGrid.from_step(self.h_x, self.x0_source)

    def wavenumbers(self) -> WavenumberGrid:
        return WavenumberGrid.from_step(self.k_lo, self.k_hi, self.h_k)


@dataclass
class TargetConfig:
    x_loc: float = 0.3
    d: float = 0.1
    contrast: float = 7.0


@dataclass
class DataConfig:
    path: Optional[str] = None
    calibration: float = 1.0


@dataclass
class NoiseConfig:
    level: float = 0.05
    seed: int = 0


@dataclass
class TailConfig:
    alpha: Optional[float] = None  # None: alpha = max(level^2, floor)


@dataclass
class ReconstructConfig:
    mode: str = "above-unity"
    c_bckgr: tuple = (1.0, 1.0)
    window: int = 3


@dataclass
class VerifyConfig:
    lambdas: tuple = (2.0, 3.0, 5.0)
    carleman_samples: int = 200
    n_samples: int = 100
    lam: float = 3.0
    R: float = 10.0
    deltas: tuple = (0.0, 0.025, 0.05)
    n_seeds: int = 5


@dataclass
class PipelineConfig:
    x_locs: tuple = (0.3,)
    contrasts: tuple = (7.0,)


@dataclass
class ExperimentConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    target: TargetConfig = field(default_factory=TargetConfig)
    data: DataConfig = field(default_factory=DataConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    tail: TailConfig = field(default_factory=TailConfig)
    minimizer: MinimizerConfig = field(default_factory=MinimizerConfig)
    reconstruct: ReconstructConfig = field(default_factory=ReconstructConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    out: str = "out"

    def validate(self):
        try:
            self.grid.spatial()
            self.grid.wavenumbers()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.grid.quad_n < 1:
            raise ConfigError("grid.quad_n: must be positive")
        if self.noise.level < 0:
            raise ConfigError("noise.level: must be non-negative")
        if self.tail.alpha is not None and self.tail.alpha <= 0:
            raise ConfigError("tail.alpha: must be positive")
        if self.reconstruct.mode not in MODES:
            raise ConfigError(f"reconstruct.mode: must be one of {MODES}")
        if len(self.reconstruct.c_bckgr) != 2 or self.reconstruct.c_bckgr[0] > self.reconstruct.c_bckgr[1]:
            raise ConfigError("reconstruct.c_bckgr: need 'lo, hi' with lo <= hi")
        if self.reconstruct.window not in (2, 3):
            raise ConfigError("reconstruct.window: must be 2 or 3")
        return self


# [carleman] is accepted as an alias section for lambda / R of the minimizer
_SECTION_ALIASES = {"carleman": "minimizer"}
_KEY_ALIASES = {"lambda": "lam", "r": "R"}  # configparser lowercases keys
_UNBOUNDED = {"none", "unbounded", "inf", ""}


def _convert(raw: str, default, name: str):
    raw = raw.strip()
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(default, tuple):
        return tuple(float(p) for p in raw.replace(",", " ").split())
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, str):
        return raw
    # Optional fields default to None
    if raw.lower() in _UNBOUNDED:
        return None
    if name == "path":
        return raw
    return float(raw)


def _apply(obj, updates: dict, section: str):
    known = {f.name: f for f in dataclasses.fields(obj)}
    for key, raw in updates.items():
        key = _KEY_ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"{section}.{key}: unknown key")
        try:
            value = _convert(raw, getattr(obj, key), key)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: {exc}") from None
        obj = dataclasses.replace(obj, **{key: value})
    return obj


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = ExperimentConfig()
    for section in cp.sections():
        target = _SECTION_ALIASES.get(section, section)
        if target == "output":
            for key, raw in cp[section].items():
                if key not in ("dir", "out"):
                    raise ConfigError(f"output.{key}: unknown key")
                cfg.out = raw.strip()
            continue
        if not hasattr(cfg, target) or not dataclasses.is_dataclass(getattr(cfg, target)):
            raise ConfigError(f"[{section}]: unknown section")
        try:
            setattr(cfg, target, _apply(getattr(cfg, target), dict(cp[section]), section))
        except ConfigError:
            raise
        except ValueError as exc:  # raised by dataclass __post_init__ checks
            raise ConfigError(f"[{section}]: {exc}") from None
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value):
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: ExperimentConfig) -> str:
    """Full resolved config in the same format :func:`parse_config` reads."""
    buf = io.StringIO()
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if not dataclasses.is_dataclass(value):
            continue
        buf.write(f"[{f.name}]\n")
        for sub in dataclasses.fields(value):
            key = "lambda" if sub.name == "lam" else sub.name
            buf.write(f"{key} = {_fmt(getattr(value, sub.name))}\n")
        buf.write("\n")
    buf.write(f"[output]\ndir = {cfg.out}\n")
    return buf.getvalue()


def as_dict(cfg: ExperimentConfig) -> dict:
    return dataclasses.asdict(cfg)
