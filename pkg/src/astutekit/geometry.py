"""Analytic support geometry: points, segments, circles, and finite unions.

Every primitive answers exact Euclidean distance queries, uniform sampling,
and the 1-D measure of its intersection with a ball.  These are the building
blocks for the synthetic data distributions and for the robustness regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySupportSet

__all__ = ["SinglePoint", "Segment", "Circle", "SupportSet", "as_point"]


def as_point(x) -> np.ndarray:
    """Coerce scalars / sequences to a float64 coordinate vector."""
    p = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if p.ndim != 1:
        raise ValueError(f"a point must be a 1-d coordinate vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


@dataclass(frozen=True, eq=False)
class SinglePoint:
    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def length(self) -> float:
        return 0.0

    def distance_many(self, pts: np.ndarray) -> np.ndarray:
        return np.linalg.norm(pts - self.center, axis=-1)

    def max_distance(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - self.center))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.broadcast_to(self.center, (n, self.dim)).copy()

    def ball_fraction(self, x: np.ndarray, r: float) -> float:
        return 1.0 if np.linalg.norm(x - self.center) <= r else 0.0

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center.copy(), self.center.copy()


@dataclass(frozen=True, eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        if self.a.shape != self.b.shape:
            raise ValueError("segment endpoints must share a dimension")
        if np.array_equal(self.a, self.b):
            raise ValueError("segment endpoints must differ")

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def distance_many(self, pts: np.ndarray) -> np.ndarray:
        v = self.b - self.a
        w = pts - self.a
        t = np.clip((w @ v) / (v @ v), 0.0, 1.0)
        proj = self.a + t[..., None] * v
        return np.linalg.norm(pts - proj, axis=-1)

    def max_distance(self, x: np.ndarray) -> float:
        return float(max(np.linalg.norm(x - self.a), np.linalg.norm(x - self.b)))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        t = rng.random(n)
        return self.a + t[:, None] * (self.b - self.a)

    def ball_fraction(self, x: np.ndarray, r: float) -> float:
        # |a + t(b-a) - x| <= r is a quadratic in the segment parameter t.
        v = self.b - self.a
        w = as_point(x) - self.a
        aa = float(v @ v)
        bb = -2.0 * float(v @ w)
        cc = float(w @ w) - r * r
        disc = bb * bb - 4.0 * aa * cc
        if disc <= 0.0:
            return 0.0
        sq = math.sqrt(disc)
        t_lo = (-bb - sq) / (2.0 * aa)
        t_hi = (-bb + sq) / (2.0 * aa)
        return max(0.0, min(t_hi, 1.0) - max(t_lo, 0.0))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.minimum(self.a, self.b), np.maximum(self.a, self.b)


@dataclass(frozen=True, eq=False)
class Circle:
    """The circle curve (not the disk); planar, so dimension is fixed at 2."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if self.center.shape[0] != 2:
            raise ValueError("circles are planar primitives (d = 2)")
        if not self.radius > 0.0:
            raise ValueError("circle radius must be positive")

    @property
    def dim(self) -> int:
        return 2

    @property
    def length(self) -> float:
        return 2.0 * math.pi * self.radius

    def distance_many(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(pts - self.center, axis=-1) - self.radius)

    def max_distance(self, x: np.ndarray) -> float:
        return float(np.linalg.norm(x - self.center)) + self.radius

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        theta = rng.random(n) * (2.0 * math.pi)
        return self.center + self.radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)

    def ball_fraction(self, x: np.ndarray, r: float) -> float:
        # Arc fraction of the circle lying within distance r of x.
        ell = float(np.linalg.norm(as_point(x) - self.center))
        if ell == 0.0:
            return 1.0 if r >= self.radius else 0.0
        t = (ell * ell + self.radius * self.radius - r * r) / (2.0 * ell * self.radius)
        if t >= 1.0:
            return 0.0
        if t <= -1.0:
            return 1.0
        return math.acos(t) / math.pi

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius


Primitive = SinglePoint | Segment | Circle


@dataclass(frozen=True, eq=False)
class SupportSet:
    """A finite union of primitives carrying a uniform (length-weighted) marginal."""

    primitives: tuple[Primitive, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        dims = {p.dim for p in self.primitives}
        if len(dims) > 1:
            raise ValueError("all primitives in a support set must share a dimension")

    def __bool__(self) -> bool:
        return bool(self.primitives)

    @property
    def dim(self) -> int:
        if not self.primitives:
            raise EmptySupportSet("empty support set has no dimension")
        return self.primitives[0].dim

    def _weights(self) -> np.ndarray:
        # Length-proportional mixture; pure point unions fall back to uniform.
        lengths = np.array([p.length for p in self.primitives], dtype=np.float64)
        total = lengths.sum()
        if total <= 0.0:
            return np.full(len(self.primitives), 1.0 / len(self.primitives))
        return lengths / total

    def distance(self, x) -> float:
        return float(self.distance_many(as_point(x)[None, :])[0])

    def distance_many(self, pts: np.ndarray) -> np.ndarray:
        if not self.primitives:
            raise EmptySupportSet("distance query against an empty support set")
        return np.min([p.distance_many(pts) for p in self.primitives], axis=0)

    def max_distance(self, x) -> float:
        if not self.primitives:
            raise EmptySupportSet("max-distance query against an empty support set")
        x = as_point(x)
        return max(p.max_distance(x) for p in self.primitives)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.distance(x) <= tol

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n uniform draws: primitive picked by length share, then uniform on it."""
        if not self.primitives:
            raise EmptySupportSet("cannot sample an empty support set")
        if n == 0:
            return np.empty((0, self.dim))
        idx = rng.choice(len(self.primitives), size=n, p=self._weights())
        out = np.empty((n, self.dim))
        for i, prim in enumerate(self.primitives):
            mask = idx == i
            cnt = int(mask.sum())
            if cnt:
                out[mask] = prim.sample(rng, cnt)
        return out

    def ball_fraction(self, x, r: float) -> float:
        """Fraction of this set's uniform measure inside the closed ball B(x, r)."""
        if not self.primitives:
            raise EmptySupportSet("measure query against an empty support set")
        x = as_point(x)
        w = self._weights()
        return float(sum(wi * p.ball_fraction(x, r) for wi, p in zip(w, self.primitives)))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.primitives:
            raise EmptySupportSet("bounds of an empty support set")
        los, his = zip(*(p.bounds() for p in self.primitives))
        return np.min(los, axis=0), np.max(his, axis=0)
