"""Points and metrics on the circle R/Z and the two-torus.

Coordinates are kept as canonical representatives in [0, 1). Distances are
computed on representatives, so no distance returned here exceeds 0.5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: default tolerance for metric identities in tests and sanity checks
METRIC_TOL = 1e-12


def reduce(x: float) -> float:
    """Canonical representative of x in [0, 1)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot reduce non-finite value {x!r}")
    r = x - math.floor(x)
    # x - floor(x) can round up to 1.0 for tiny negative x
    return r if r < 1.0 else 0.0


def circle_dist(a, b) -> float:
    """min(|a-b|, 1-|a-b|) over canonical representatives."""
    d = abs(reduce(float(a)) - reduce(float(b)))
    return d if d <= 0.5 else 1.0 - d


def wrap_abs(v):
    """Elementwise distance to the nearest integer. Accepts scalars or arrays.

    For a difference v = a - b of circle coordinates this equals the circle
    distance between a and b.
    """
    v = np.asarray(v, dtype=float)
    out = np.abs(v - np.round(v))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CirclePoint:
    """A point of R/Z held as its representative in [0, 1)."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", reduce(self.value))

    def __float__(self) -> float:
        return self.value

    def shifted(self, t: float) -> "CirclePoint":
        return CirclePoint(self.value + t)


@dataclass(frozen=True)
class TorusPoint:
    """A point of the two-torus with circle-valued coordinates."""

    x: CirclePoint
    y: CirclePoint

    @classmethod
    def of(cls, x: float, y: float) -> "TorusPoint":
        return cls(CirclePoint(x), CirclePoint(y))

    def as_tuple(self) -> tuple[float, float]:
        return (self.x.value, self.y.value)


def torus_dist(p: TorusPoint, q: TorusPoint) -> float:
    """Max metric on the torus: max of the two coordinate circle distances."""
    return max(circle_dist(p.x.value, q.x.value), circle_dist(p.y.value, q.y.value))
