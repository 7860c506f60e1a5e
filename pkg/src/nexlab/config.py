"""Experiment configuration: one JSON document, CLI flags override fields."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .errors import ConfigError

PRESETS = ("siegel-deepness", "feigenbaum-deepness", "leafcheck", "rays",
           "regularity", "feigenbaum", "raster")

DEFAULT_RADII = (0.2, 0.1, 0.05, 0.025, 0.0125)


@dataclass
class ExperimentConfig:
    """All knobs of one experiment run; the seed is recorded in every
    output artifact."""

    preset: str = "siegel-deepness"
    theta: float | str | None = "golden"   # "golden" or a float in (0,1)
    c: tuple = (0.0, 0.0)
    window: tuple = (-2.0, 2.0, -2.0, 2.0)
    res: int = 1024
    max_iter: int = 1000
    escape_radius: float = 1e3
    cloud: int = 100_000
    n_points: int = 20
    radii: tuple = DEFAULT_RADII
    strategy: str = "outside-K-nearest-boundary"
    depth: int = 200
    n_orbits: int = 5
    s: float = 0.5
    samples: int = 256
    n: int = 3                  # ray lifting depth
    z0: tuple = (4.0, 0.0)
    angle: float = 0.0
    eps: float = 1e-6
    m: int = 10                 # cascade length for feigenbaum presets
    seed: int = 0
    out: str = "out"

    def validate(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; "
                              f"choose one of {', '.join(PRESETS)}")
        if self.res < 2:
            raise ConfigError("res must be >= 2")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.escape_radius < 3:
            raise ConfigError("escape_radius must be >= 3")
        if len(self.window) != 4 or not (self.window[1] > self.window[0]
                                         and self.window[3] > self.window[2]):
            raise ConfigError(f"degenerate window {self.window}")
        if any(b >= a for a, b in zip(self.radii, self.radii[1:])):
            raise ConfigError("radii must be strictly decreasing")
        if not (0.0 < self.s < 1.0):
            raise ConfigError("s must lie in (0, 1)")
        if self.depth < 0 or self.n < 0:
            raise ConfigError("depths must be nonnegative")
        if self.theta is not None and self.theta != "golden":
            t = float(self.theta)
            if not (0.0 < t < 1.0):
                raise ConfigError("theta must lie in (0, 1)")
        if not (2 <= self.m <= 14):
            raise ConfigError("m must be between 2 and 14")
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**data)
        for name in ("c", "window", "radii", "z0"):
            setattr(cfg, name, tuple(getattr(cfg, name)))
        return cfg.validate()

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)
