"""Neighborhood-preserving robustness regions.

The region anchored at x with shrink factor kappa is the open set of points
x' with rho(x, x') < kappa * rho(opposite support, x'), where the opposite
support is the union of the other class's support with the eta = 1/2 set.
Membership is exact up to a conservative boundary tolerance: points within
BOUNDARY_TOL of the decision surface count as outside, so certificates built
on these regions never lean on ambiguous floating-point comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DataDistribution, SupportSide
from .errors import KappaOutOfRange, UnboundedRegion
from .geometry import as_point

__all__ = ["BOUNDARY_TOL", "RobustnessRegion", "BoundingBox", "make_region"]

# Points whose membership margin is below this are treated as outside.
BOUNDARY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class BoundingBox:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        if np.any(self.lo > self.hi):
            raise ValueError("box must satisfy lo <= hi componentwise")

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)


@dataclass(frozen=True, eq=False)
class RobustnessRegion:
    anchor: np.ndarray
    kappa: float
    dist: DataDistribution
    opposite: SupportSide
    degenerate: bool
    anchor_opposite_distance: float

    @property
    def dim(self) -> int:
        return self.anchor.shape[0]

    # -- membership ----------------------------------------------------------

    def margin_many(self, pts: np.ndarray) -> np.ndarray:
        """kappa * rho(opposite, p) - rho(anchor, p); positive inside."""
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        d_anchor = np.linalg.norm(pts - self.anchor, axis=1)
        d_opp = self.dist.support_distance_many(self.opposite, pts)
        return self.kappa * d_opp - d_anchor

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        if self.degenerate:
            return np.all(pts == self.anchor, axis=1)
        d_anchor = np.linalg.norm(pts - self.anchor, axis=1)
        d_opp = self.dist.support_distance_many(self.opposite, pts)
        inside = self.kappa * d_opp - d_anchor > BOUNDARY_TOL
        # At the anchor itself the distances carry no rounding error, so the
        # strict comparison needs no tolerance; this keeps anchor membership
        # exact even for very thin regions.
        at_anchor = d_anchor == 0.0
        inside[at_anchor] = d_opp[at_anchor] > 0.0
        return inside

    def contains(self, xp) -> bool:
        return bool(self.contains_many(as_point(xp)[None, :])[0])

    # -- enumeration ---------------------------------------------------------

    def bounding_box(self) -> BoundingBox:
        """Axis-aligned box covering the region.

        For kappa < 1 the triangle inequality gives
        rho(anchor, p) < kappa / (1 - kappa) * rho(anchor, opposite)
        for every region point p, so a cube of that radius suffices.
        """
        if self.degenerate:
            return BoundingBox(self.anchor.copy(), self.anchor.copy())
        if self.kappa >= 1.0:
            raise UnboundedRegion(
                "boundedness is certified only for kappa < 1; the full region "
                "(kappa = 1) may extend to infinity"
            )
        radius = self.kappa / (1.0 - self.kappa) * self.anchor_opposite_distance
        radius *= 1.0 + 1e-9  # slack so the open region's closure fits
        return BoundingBox(self.anchor - radius, self.anchor + radius)

    def grid(self, step: float) -> np.ndarray:
        """Region points of the step-spaced lattice anchored at the anchor.

        The anchor sits exactly on the lattice and always passes membership
        for non-degenerate regions, so astuteness checks always test x itself.
        Returns an (m, d) array in lexicographic lattice order.
        """
        if step <= 0.0:
            raise ValueError("step must be positive")
        if self.degenerate:
            return self.anchor[None, :].copy()
        box = self.bounding_box()
        offsets = self.lattice_offsets(step, box)
        pts = self.anchor + offsets * step
        return pts[self.contains_many(pts)]

    def lattice_offsets(self, step: float, box: BoundingBox) -> np.ndarray:
        """Integer lattice offsets (m, d) whose points fall inside the box."""
        axes = []
        for j in range(self.dim):
            k_lo = math.ceil((box.lo[j] - self.anchor[j]) / step - 1e-12)
            k_hi = math.floor((box.hi[j] - self.anchor[j]) / step + 1e-12)
            axes.append(np.arange(k_lo, k_hi + 1, dtype=np.int64))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def make_region(dist: DataDistribution, x, kappa: float) -> RobustnessRegion:
    """Region for anchor x; opposite set chosen by the sign of eta(x) - 1/2.

    Raises QueryOutsideSupport when eta is undefined at x and KappaOutOfRange
    unless 0 < kappa <= 1 (kappa = 1 encodes the full region, which supports
    membership queries but not enumeration).
    """
    if not (0.0 < kappa <= 1.0):
        raise KappaOutOfRange(f"kappa must lie in (0, 1], got {kappa}")
    x = as_point(x)
    eta = dist.eta(x)
    if eta == 0.5:
        return RobustnessRegion(x, float(kappa), dist, SupportSide.NEG_AND_HALF, True, 0.0)
    side = SupportSide.NEG_AND_HALF if eta > 0.5 else SupportSide.POS_AND_HALF
    d_opp = dist.support_distance(side, x)
    return RobustnessRegion(x, float(kappa), dist, side, False, d_opp)
