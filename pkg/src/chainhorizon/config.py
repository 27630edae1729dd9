"""Tolerances and the verdict type shared by the criteria and the oracle."""
from __future__ import annotations

import enum
import os
from dataclasses import asdict, dataclass, field, fields

from .errors import ValidationError

ENV_PREFIX = "CHAINHORIZON_"


@dataclass(frozen=True)
class ToleranceConfig:
    real_tol: float = 1e-9
    boundary_tol: float = 1e-9
    cluster_tol: float = 1e-6
    band_tol: float = 1e-6
    eps_b: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise ValidationError(f"tolerance {f.name} must be > 0, got {v!r}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "ToleranceConfig":
        """Defaults, then ``CHAINHORIZON_<NAME>`` variables, then keyword overrides."""
        environ = os.environ if environ is None else environ
        kw = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                try:
                    kw[f.name] = float(raw)
                except ValueError:
                    raise ValidationError(f"bad value for {ENV_PREFIX + f.name.upper()}: {raw!r}")
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = ToleranceConfig()


class Region(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


EXIT_CODES = {Region.INSIDE: 0, Region.OUTSIDE: 1, Region.BOUNDARY: 2}


@dataclass(frozen=True)
class Verdict:
    region: Region
    margin: float
    violated: tuple = ()
    flags: tuple = ()
    method: str = "criteria"
    slacks: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_slacks(cls, slacks: dict, tol: ToleranceConfig, method: str, flags=()) -> "Verdict":
        margin = min(slacks.values()) if slacks else 0.0
        violated = tuple(k for k, v in slacks.items() if v < 0)
        return cls(region_of(margin, tol), margin, violated, tuple(flags), method, dict(slacks))

    @property
    def closed_inside(self) -> bool:
        """Inside or on the horizon."""
        return self.region is not Region.OUTSIDE

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "region": self.region.value,
            "margin": self.margin,
            "violated": list(self.violated),
            "flags": list(self.flags),
        }


def region_of(margin: float, tol: ToleranceConfig) -> Region:
    if abs(margin) <= tol.boundary_tol:
        return Region.BOUNDARY
    return Region.INSIDE if margin > 0 else Region.OUTSIDE
