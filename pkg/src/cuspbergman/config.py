"""Run configuration for the command-line studies."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .forms import cusp_dimension, format_weight, parse_weight

INTEGRAL_SWEEP = tuple(str(k) for k in range(12, 121, 12))
HALF_SWEEP = ("25/2", "49/2", "73/2", "97/2", "121/2")
DEFAULT_WEIGHTS = INTEGRAL_SWEEP + HALF_SWEEP
DEFAULT_PROBE_XY = ((0.0, 1.0), (0.5, math.sqrt(3.0) / 2.0 + 0.2), (0.1, 1.5))

MODEL_M = (8, 16, 32, 64)
MODEL_T = (0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)


@dataclass(frozen=True)
class QuadratureConfig:
    y_cap: float | None = None  # None: sized from the slowest cusp decay
    panels: tuple[int, int] = (48, 48)
    nodes: int = 10


@dataclass(frozen=True)
class RunConfig:
    weights: tuple[str, ...] = DEFAULT_WEIGHTS
    probes: tuple[tuple[float, float], ...] = DEFAULT_PROBE_XY
    y_cut: float = 4.0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    trunc: int | None = None
    precision: int = 53
    output: str | None = None
    format: str = "csv"
    coarse: int = 64
    refine_steps: int = 10

    def __post_init__(self):
        for k in self.weights:
            k = parse_weight(k)
            cusp_dimension(k)  # rejects odd integral weights
        for x, y in self.probes:
            if not (math.isfinite(x) and math.isfinite(y) and y > 0):
                raise ValueError(f"probe ({x}, {y}) is not in the upper half-plane")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.format!r}")
        if self.precision not in (53, 64):
            raise ValueError("pipeline precision must be 53 (double) or 64 (extended) bits")
        if self.y_cut < 1.0:
            raise ValueError("y_cut must be at least 1")
        if self.trunc is not None and self.trunc < 2:
            raise ValueError("trunc must be at least 2")

    @property
    def probe_points(self) -> tuple[complex, ...]:
        return tuple(complex(x, y) for x, y in self.probes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = [format_weight(parse_weight(k)) for k in self.weights]
        return d

    def digest(self) -> str:
        """sha256 of the canonical JSON form, excluding where the output goes."""
        d = self.to_dict()
        d.pop("output")
        d.pop("format")
        return hashlib.sha256(json.dumps(d, sort_keys=True, separators=(",", ":")).encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        d = dict(d)
        if "weights" in d:
            d["weights"] = tuple(str(k) for k in d["weights"])
        if "probes" in d:
            d["probes"] = tuple((float(x), float(y)) for x, y in d["probes"])
        if "quadrature" in d:
            q = dict(d["quadrature"])
            if "panels" in q:
                q["panels"] = tuple(int(p) for p in q["panels"])
            d["quadrature"] = QuadratureConfig(**q)
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})
