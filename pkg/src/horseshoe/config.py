"""Run configuration for the command-line front end.

A run is described by one flat set of knobs: map parameters, cone
slopes, the time window, grid and depth resolutions, and output
options.  Values come from built-in defaults, then an optional JSON
config file, then command-line flags; later sources win per key.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

from .cones import ConeParams
from .geometry import HenonGeometry, build_geometry
from .maps import HenonParams, HenonSequence

__all__ = ["ConfigError", "RunConfig", "load_config_file", "make_config"]

KNOWN_FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps this to a usage error."""


@dataclass(frozen=True)
class RunConfig:
    a_star: float = 9.5
    epsilon: float = 0.1
    mu_h: float = 0.615
    mu_v: float = 0.615
    mu: float = 0.618
    n_min: int = -100
    n_max: int = 100
    grid: int = 256
    depth: int = 8
    output_dir: str = "out"
    formats: tuple[str, ...] = ("csv", "json", "svg")

    def __post_init__(self) -> None:
        for name in ("a_star", "epsilon", "mu_h", "mu_v", "mu"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
        for name in ("n_min", "n_max", "grid", "depth"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if self.n_min > self.n_max:
            raise ConfigError(
                f"empty time window: n_min = {self.n_min} > n_max = {self.n_max}"
            )
        if self.grid < 2:
            raise ConfigError(f"grid must be at least 2, got {self.grid}")
        if self.depth < 1:
            raise ConfigError(f"depth must be at least 1, got {self.depth}")
        bad = [f for f in self.formats if f not in KNOWN_FORMATS]
        if bad:
            raise ConfigError(
                f"unknown formats {bad}; choose from {list(KNOWN_FORMATS)}"
            )
        if not self.formats:
            raise ConfigError("at least one output format is required")

    @property
    def n_window(self) -> tuple[int, int]:
        return (self.n_min, self.n_max)

    def map_params(self) -> HenonParams:
        try:
            return HenonParams(a_star=self.a_star, epsilon=self.epsilon)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def cone_params(self) -> ConeParams:
        try:
            return ConeParams(mu_h=self.mu_h, mu_v=self.mu_v, mu=self.mu)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def geometry(self) -> HenonGeometry:
        try:
            return build_geometry(self.map_params(), mu_h=self.mu_h, mu_v=self.mu_v)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def sequence(self) -> HenonSequence:
        return HenonSequence(self.map_params())

    def as_dict(self) -> dict:
        return {
            "a_star": self.a_star,
            "epsilon": self.epsilon,
            "mu_h": self.mu_h,
            "mu_v": self.mu_v,
            "mu": self.mu,
            "n_window": [self.n_min, self.n_max],
            "grid": self.grid,
            "depth": self.depth,
            "output_dir": self.output_dir,
            "formats": list(self.formats),
        }


def _parse_formats(value) -> tuple[str, ...]:
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = [str(p) for p in value]
    else:
        raise ConfigError(f"formats must be a list or comma string, got {value!r}")
    # Deduplicate but keep a fixed emission order.
    return tuple(f for f in KNOWN_FORMATS if f in parts) or tuple(parts)


def load_config_file(path: str) -> dict:
    """Read a JSON config file into a flat key-value dict.

    Accepts the RunConfig field names, with the time window spelled
    either as "n_window": [lo, hi] or as separate n_min / n_max keys.

    Raises:
        ConfigError: unreadable file, non-object JSON, or unknown keys.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")

    known = {f.name for f in fields(RunConfig)} | {"n_window"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {unknown}")

    values = dict(raw)
    window = values.pop("n_window", None)
    if window is not None:
        if (
            not isinstance(window, (list, tuple))
            or len(window) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in window)
        ):
            raise ConfigError(f"n_window must be a pair of integers, got {window!r}")
        values["n_min"], values["n_max"] = window
    if "formats" in values:
        values["formats"] = _parse_formats(values["formats"])
    return values


def make_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Layer defaults, config-file values, and flag overrides.

    Overrides with value None are treated as absent, which is how
    unset CLI flags arrive.
    """
    config = RunConfig()
    for layer in (file_values, overrides):
        if not layer:
            continue
        cleaned = {k: v for k, v in layer.items() if v is not None}
        if "formats" in cleaned:
            cleaned["formats"] = _parse_formats(cleaned["formats"])
        try:
            config = replace(config, **cleaned)
        except TypeError as exc:
            raise ConfigError(f"invalid config key: {exc}") from exc
    return config
