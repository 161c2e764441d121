"""Synthetic data distributions with exact support geometry.

A distribution is a pair (marginal over instances, class-probability
function).  The marginal is a length-weighted uniform mixture over two
disjoint analytic support sets; the class-probability function is either
piecewise constant (Bayes label flipped with a fixed noise rate) or the
analytic ramp eta(x) = x on the unit interval.

All randomness flows through numpy's PCG64 generator seeded explicitly;
derived seeds are built with SeedSequence spawn keys so that every sampling
call is reproducible bit-for-bit and safe to run concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySupportSet, QueryOutsideSupport
from .geometry import Circle, Segment, SinglePoint, SupportSet, as_point

__all__ = [
    "SupportSide",
    "EtaKind",
    "Dataset",
    "DataDistribution",
    "make_line_distribution",
    "make_two_circles_distribution",
    "make_two_segments_distribution",
    "derive_seed",
]

# Membership slack for "x lies on the support" checks.
SUPPORT_TOL = 1e-9


class SupportSide(enum.Enum):
    POS = "pos"
    NEG = "neg"
    HALF = "half"
    NEG_AND_HALF = "neg_and_half"
    POS_AND_HALF = "pos_and_half"


class EtaKind(enum.Enum):
    # Class probability is 1 - noise on the positive support, noise on the
    # negative support, undefined elsewhere.
    PIECEWISE_CONSTANT = "piecewise_constant"
    # eta(x) = x on [0, 1]; the one analytic formula the toolkit ships.
    LINEAR_UNIT = "linear_unit"


def derive_seed(root: int, *key: int) -> int:
    """Deterministic child seed from a root seed and integer coordinates."""
    ss = np.random.SeedSequence(entropy=int(root), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered labeled sample with per-point tie-break keys.

    The keys are i.i.d. uniforms drawn at sampling time; nearest-neighbor
    queries treat a smaller key as closer when distances tie, which makes
    prediction deterministic given the dataset.
    """

    X: np.ndarray          # (n, d) float64
    y: np.ndarray          # (n,) int, values in {+1, -1}
    tiebreak_keys: np.ndarray  # (n,) float64, pairwise distinct
    seed: int

    def __post_init__(self):
        if self.X.ndim != 2:
            raise ValueError("X must be (n, d)")
        n = self.X.shape[0]
        if self.y.shape != (n,) or self.tiebreak_keys.shape != (n,):
            raise ValueError("labels / keys must align with X")
        if n and not np.all(np.isin(self.y, (-1, 1))):
            raise ValueError("labels must be +1 or -1")

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def with_labels(self, y: np.ndarray) -> "Dataset":
        """Same locations and keys, different labels (for invariance tests)."""
        return Dataset(self.X, np.asarray(y), self.tiebreak_keys, self.seed)


@dataclass(frozen=True, eq=False)
class DataDistribution:
    """Immutable distribution descriptor; safe to share across threads."""

    name: str
    pos_support: SupportSet
    neg_support: SupportSet
    half_support: SupportSet
    pos_weight: float
    label_noise: float
    eta_kind: EtaKind

    def __post_init__(self):
        if not (0.0 <= self.pos_weight <= 1.0):
            raise ValueError("pos_weight must be a probability")
        if not (0.0 <= self.label_noise < 0.5):
            raise ValueError("label_noise must lie in [0, 0.5)")
        if not self.pos_support or not self.neg_support:
            # One-class distributions give every robustness region an empty
            # opposite set; reject them up front.
            raise ValueError("both class supports must be non-empty")

    @property
    def dim(self) -> int:
        return self.pos_support.dim

    # -- support queries ---------------------------------------------------

    def _side_sets(self, side: SupportSide) -> tuple[SupportSet, ...]:
        table = {
            SupportSide.POS: (self.pos_support,),
            SupportSide.NEG: (self.neg_support,),
            SupportSide.HALF: (self.half_support,),
            SupportSide.NEG_AND_HALF: (self.neg_support, self.half_support),
            SupportSide.POS_AND_HALF: (self.pos_support, self.half_support),
        }
        return tuple(s for s in table[side] if s)

    def support_distance(self, side: SupportSide, x) -> float:
        """Exact Euclidean distance from x to the named support union."""
        return float(self.support_distance_many(side, as_point(x)[None, :])[0])

    def support_distance_many(self, side: SupportSide, pts: np.ndarray) -> np.ndarray:
        sets = self._side_sets(side)
        if not sets:
            raise EmptySupportSet(f"support union {side.value} is empty for {self.name}")
        return np.min([s.distance_many(pts) for s in sets], axis=0)

    def on_support(self, x, tol: float = SUPPORT_TOL) -> bool:
        sets = [self.pos_support, self.neg_support]
        if self.half_support:
            sets.append(self.half_support)
        return any(s.contains(x, tol) for s in sets)

    # -- class probability and references ------------------------------------

    def eta(self, x) -> float:
        """P(y = +1 | x).  Undefined (raises) off the support for the
        piecewise-constant kind."""
        x = as_point(x)
        if self.eta_kind is EtaKind.LINEAR_UNIT:
            v = float(x[0])
            if not (0.0 <= v <= 1.0) or x.shape[0] != 1:
                raise QueryOutsideSupport(f"eta undefined at {x!r}")
            return v
        if self.half_support and self.half_support.contains(x):
            return 0.5
        if self.pos_support.contains(x):
            return 1.0 - self.label_noise
        if self.neg_support.contains(x):
            return self.label_noise
        raise QueryOutsideSupport(f"eta undefined at {x!r} for {self.name}")

    def bayes_label(self, x) -> int:
        """+1 iff eta(x) >= 1/2."""
        return 1 if self.eta(x) >= 0.5 else -1

    def bayes_accuracy(self) -> float:
        """Accuracy of the Bayes-optimal rule under this distribution."""
        if self.eta_kind is EtaKind.LINEAR_UNIT:
            # integral of max(x, 1-x) over [0, 1]
            return 0.75
        return 1.0 - self.label_noise

    # -- measure ------------------------------------------------------------

    def measure_ball(self, x, r: float) -> float:
        """Marginal mass of the closed ball B(x, r)."""
        x = as_point(x)
        m = self.pos_weight * self.pos_support.ball_fraction(x, r)
        m += (1.0 - self.pos_weight) * self.neg_support.ball_fraction(x, r)
        return m

    def support_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        los, his = zip(*(s.bounds() for s in (self.pos_support, self.neg_support)))
        return np.min(los, axis=0), np.max(his, axis=0)

    def support_sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """n marginal draws plus each point's support Bayes label (+1 / -1)."""
        on_pos = rng.random(n) < self.pos_weight
        pts = np.empty((n, self.dim))
        n_pos = int(on_pos.sum())
        # Positive support drawn first, then negative: the order is part of
        # the documented sampling scheme.
        if n_pos:
            pts[on_pos] = self.pos_support.sample(rng, n_pos)
        if n - n_pos:
            pts[~on_pos] = self.neg_support.sample(rng, n - n_pos)
        labels = np.where(on_pos, 1, -1)
        return pts, labels

    def sample(self, n: int, seed: int) -> Dataset:
        """n i.i.d. draws; bit-identical for identical (distribution, n, seed).

        Draw order: support picks, support positions, label uniforms,
        tie-break keys (regenerated wholesale on the measure-zero collision).
        """
        if n < 0:
            raise ValueError("n must be non-negative")
        rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
        if self.eta_kind is EtaKind.LINEAR_UNIT:
            x = rng.random(n)
            y = np.where(rng.random(n) < x, 1, -1)
            pts = x[:, None]
        else:
            pts, bayes = self.support_sample(rng, n)
            flip = rng.random(n) < self.label_noise
            y = np.where(flip, -bayes, bayes)
        keys = rng.random(n)
        while n and np.unique(keys).size < n:
            keys = rng.random(n)
        return Dataset(pts, y.astype(np.int64), keys, int(seed))


def make_line_distribution() -> DataDistribution:
    """Uniform marginal on [0, 1] with eta(x) = x.

    The positive support is [1/2, 1] (eta > 1/2 convention), the negative
    support [0, 1/2], and {1/2} is stored separately as the eta = 1/2 set;
    distances to the closed segments equal distances to the half-open
    conventions, so all geometry stays exact.
    """
    return DataDistribution(
        name="line",
        pos_support=SupportSet((Segment(np.array([0.5]), np.array([1.0])),)),
        neg_support=SupportSet((Segment(np.array([0.0]), np.array([0.5])),)),
        half_support=SupportSet((SinglePoint(np.array([0.5])),)),
        pos_weight=0.5,
        label_noise=0.0,
        eta_kind=EtaKind.LINEAR_UNIT,
    )


def make_two_circles_distribution() -> DataDistribution:
    """Outer unit circle (positive, weight 0.7) vs. inner circle of radius 0.2
    centered at (0.5, 0) (negative, weight 0.3), with label noise 0.2."""
    return DataDistribution(
        name="two_circles",
        pos_support=SupportSet((Circle(np.array([0.0, 0.0]), 1.0),)),
        neg_support=SupportSet((Circle(np.array([0.5, 0.0]), 0.2),)),
        half_support=SupportSet(),
        pos_weight=0.7,
        label_noise=0.2,
        eta_kind=EtaKind.PIECEWISE_CONSTANT,
    )


def make_two_segments_distribution(
    pos_segment: tuple[float, float] = (0.0, 0.3),
    neg_segment: tuple[float, float] = (0.7, 1.0),
    label_noise: float = 0.1,
    pos_weight: float = 0.5,
) -> DataDistribution:
    """Two disjoint 1-D segments; the stock geometry for the histogram demo."""
    a, b = pos_segment
    c, d = neg_segment
    if not (a < b and c < d):
        raise ValueError("segments must be non-degenerate")
    lo, hi = sorted([(a, b), (c, d)])
    if lo[1] >= hi[0]:
        raise ValueError("segments must be disjoint")
    return DataDistribution(
        name="two_segments",
        pos_support=SupportSet((Segment(np.array([a]), np.array([b])),)),
        neg_support=SupportSet((Segment(np.array([c]), np.array([d])),)),
        half_support=SupportSet(),
        pos_weight=pos_weight,
        label_noise=label_noise,
        eta_kind=EtaKind.PIECEWISE_CONSTANT,
    )
