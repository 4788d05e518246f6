"""Experiment configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from ..beamformers import METHODS
from ..channel import DomainDims


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    m_y: int = 16
    m_z: int = 8
    k_y: int = 4
    k_z: int = 4
    n_y: int = 10
    n_z: int = 10
    paths: int = 4
    delta_deg: float = 2.5
    az_lo_deg: float = -60.0
    az_hi_deg: float = 60.0
    gain_var: float = 1.0
    snr_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    sigma_z_db: tuple[float, ...] = (-20.0, -14.0, -8.0, -2.0, 4.0)
    # IRS splits for the complexity sweep, "N" (perfect square) or "N_yxN_z"
    n_grid: tuple[str, ...] = ("100", "400", "900", "1600", "2500")
    trials: int = 2000
    seed: int = 1
    methods: tuple[str, ...] = METHODS
    workers: int = 1
    out: str = "results.csv"

    def __post_init__(self):
        for name in ("m_y", "m_z", "k_y", "k_z", "n_y", "n_z", "paths", "trials", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer, got {getattr(self, name)}")
        if not 0 <= self.delta_deg <= 90:
            raise ConfigError(f"delta_deg must lie in [0, 90], got {self.delta_deg}")
        if self.az_lo_deg > self.az_hi_deg:
            raise ConfigError(f"empty azimuth range [{self.az_lo_deg}, {self.az_hi_deg}]")
        if self.gain_var <= 0:
            raise ConfigError(f"gain_var must be positive, got {self.gain_var}")
        for name in ("snr_db", "sigma_z_db", "n_grid", "methods"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")

    @property
    def dims(self) -> DomainDims:
        return DomainDims(self.m_y, self.m_z, self.k_y, self.k_z, self.n_y, self.n_z)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    default = _FIELDS[key].default
    try:
        if isinstance(default, tuple):
            items = [s.strip() for s in raw.split(",") if s.strip()]
            if default and isinstance(default[0], float):
                return tuple(float(s) for s in items)
            return tuple(items)
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        return type(default)(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` starts a comment)."""
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None,
    )
    parser.optionxform = str
    try:
        parser.read_string("[experiment]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    values = {}
    for key, raw in parser["experiment"].items():
        if key not in _FIELDS:
            raise ConfigError(f"{source}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    return ExperimentConfig(**values)


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for name in _FIELDS:
        value = getattr(cfg, name)
        if isinstance(value, tuple):
            value = ", ".join(str(v) for v in value)
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"


def parse_n_split(item: str):
    """``"100"`` -> (10, 10); ``"20x5"`` -> (20, 5); non-squares need an explicit split."""
    item = item.strip().lower()
    if "x" in item:
        a, b = item.split("x", 1)
        try:
            n_y, n_z = float(a), float(b)
        except ValueError:
            raise ConfigError(f"bad IRS split {item!r}") from None
    else:
        try:
            n = int(item)
        except ValueError:
            raise ConfigError(f"bad IRS size {item!r}") from None
        root = int(round(n ** 0.5))
        if n < 1 or root * root != n:
            raise ConfigError(f"N={n} is not a perfect square; give an explicit N_yxN_z split")
        return root, root
    if n_y <= 0 or n_z <= 0:
        raise ConfigError(f"IRS split must be positive, got {item!r}")
    return _intish(n_y), _intish(n_z)


def _intish(x: float):
    return int(x) if float(x).is_integer() else x
