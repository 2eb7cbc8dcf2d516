"""Experiment configuration: flat ``key = value`` files plus flag overrides."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import ConfigError
from .maps import MapSpec
from .streams import check_seed

LIST_INT = "list[int]"
LIST_FLOAT = "list[float]"


@dataclass(frozen=True)
class ExperimentConfig:
    # map
    parity: str = "odd"
    order: int = 3
    inner_half_width: Optional[float] = None
    outer_half_width: Optional[float] = None
    a0: Optional[float] = None
    slope_target: float = 1.75
    landing_time: int = 3
    # skew product
    d: int = 16
    alpha: float = 1e-6
    # sampling
    seed: int = 0
    grid_size: int = 2 ** 14
    sample_count: int = 1000
    decay_samples: int = 2 ** 20
    curve_seeds: int = 20
    level4_elements: int = 200
    n_values: Optional[tuple] = None
    r_values: Optional[tuple] = None
    proof_scaling: bool = False
    # constant overrides
    rho2: Optional[float] = None
    sigma0: Optional[float] = None
    eta: Optional[float] = None
    kappa: Optional[float] = None
    delta0: Optional[float] = None
    ratio_cap: Optional[float] = None
    Ccal: Optional[float] = None
    gamma2: Optional[float] = None
    # sweep grid
    orders: tuple = (3,)
    alphas: tuple = (1e-6,)
    ds: tuple = (16,)
    # plumbing
    out: str = "viana_lab_out.csv"
    workers: int = 1

    def map_spec(self, order: Optional[int] = None) -> MapSpec:
        D = self.order if order is None else order
        parity = self.parity if order is None else ("odd" if D % 2 else "even")
        return MapSpec(parity=parity, order=D, inner_half_width=self.inner_half_width,
                       outer_half_width=self.outer_half_width, a0=self.a0, slope_target=self.slope_target,
                       landing_time=self.landing_time)

    def overrides(self) -> dict:
        keys = ("rho2", "sigma0", "eta", "kappa", "delta0", "ratio_cap", "Ccal", "gamma2")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}

    def hashed_dict(self) -> dict:
        """Fields that determine results; output path and worker count excluded."""
        d = asdict(self)
        d.pop("out")
        d.pop("workers")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    def hash(self) -> str:
        text = json.dumps(self.hashed_dict(), sort_keys=True, allow_nan=False)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def validate(self) -> "ExperimentConfig":
        """Check everything that does not need a constructed map."""
        self.map_spec().resolved()
        check_seed(self.seed)
        if int(self.d) != self.d or self.d < 16:
            raise ConfigError(f"d must be an integer >= 16, got {self.d}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        g = self.grid_size
        if g < 2 or g & (g - 1):
            raise ConfigError(f"grid_size must be a power of two, got {g}")
        for name in ("sample_count", "decay_samples", "curve_seeds", "level4_elements"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.n_values is not None and any(n <= 0 for n in self.n_values):
            raise ConfigError("n_values must be positive")
        for D in self.orders:
            if D < 2:
                raise ConfigError(f"sweep order must be >= 2, got {D}")
        return self


_TYPES = {
    "parity": str, "order": int, "inner_half_width": float, "outer_half_width": float, "a0": float,
    "slope_target": float, "landing_time": int, "d": int, "alpha": float, "seed": int, "grid_size": int,
    "sample_count": int, "decay_samples": int, "curve_seeds": int, "level4_elements": int,
    "n_values": LIST_INT, "r_values": LIST_FLOAT, "proof_scaling": bool, "rho2": float, "sigma0": float,
    "eta": float, "kappa": float, "delta0": float, "ratio_cap": float, "Ccal": float, "gamma2": float,
    "orders": LIST_INT, "alphas": LIST_FLOAT, "ds": LIST_INT, "out": str, "workers": int,
}
assert set(_TYPES) == {f.name for f in fields(ExperimentConfig)}


def field_names():
    return list(_TYPES)


def field_type(name: str):
    return _TYPES[name]


def normalize_key(key: str) -> str:
    k = key.strip().replace("-", "_")
    lower = {n.lower(): n for n in _TYPES}
    if k not in _TYPES and k.lower() in lower:
        k = lower[k.lower()]
    if k not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    return k


def _int(text: str) -> int:
    t = text.strip().replace("_", "")
    try:
        return int(t)
    except ValueError:
        v = float(t)
        if v != int(v):
            raise
        return int(v)


def parse_value(name: str, text: str):
    t = _TYPES[name]
    text = text.strip()
    try:
        if text.lower() in ("none", "") and t not in (str,):
            return None
        if t is str:
            return text
        if t is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if t is int:
            return _int(text)
        if t is float:
            return float(text)
        items = [s for s in text.replace(" ", ",").split(",") if s]
        conv = _int if t == LIST_INT else float
        return tuple(conv(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        name = normalize_key(key)
        out[name] = parse_value(name, value)
    return out


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    values = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for k, v in (overrides or {}).items():
        values[normalize_key(k)] = v
    try:
        return replace(ExperimentConfig(), **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
