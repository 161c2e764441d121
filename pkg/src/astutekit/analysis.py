"""Diagnostic quantities behind the consistency analysis: probability radii,
brute-force splitting numbers, and empirical estimators of the tail-weight
and max-weight conditions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .classifiers import HistogramClassifier, KernelClassifier, KernelId, KNNClassifier
from .distributions import DataDistribution
from .errors import EnumerationTooLarge
from .geometry import as_point

__all__ = [
    "SplittingEnumeration",
    "ConditionEstimate",
    "probability_radius",
    "splitting_number_bruteforce",
    "estimate_condition2",
    "estimate_condition3",
]

_BISECT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SplittingEnumeration:
    """All distinct index sets cut out by (query, distance cap, weight floor)
    triples, enumerated exactly over a critical arrangement plus a dense
    fallback grid validated by 2x densification."""

    subsets: frozenset[frozenset[int]]
    count: int
    sample_size: int
    dimension: int
    grid_stable: bool

    def __post_init__(self):
        assert self.count == len(self.subsets)
        assert frozenset() in self.subsets


@dataclass(frozen=True)
class ConditionEstimate:
    condition: str  # "cond2" or "cond3"
    n: int
    value: float
    grid_resolution: int | None
    seed: int
    p: float | None = None

    def __post_init__(self):
        assert self.value >= 0.0


# ---------------------------------------------------------------------------
# probability radius
# ---------------------------------------------------------------------------


def probability_radius(dist: DataDistribution, x, p: float, tol: float = 1e-9) -> float:
    """Smallest radius whose closed ball around x holds marginal mass >= p.

    The ball mass is analytic for every shipped support primitive, so the
    radius is found by bisection to absolute tolerance tol (the bracket is
    tightened well past the requested tolerance).
    """
    if not (0.0 < p <= 1.0):
        raise ValueError("p must lie in (0, 1]")
    x = as_point(x)
    if dist.measure_ball(x, 0.0) >= p:
        return 0.0
    hi = max(dist.pos_support.max_distance(x), dist.neg_support.max_distance(x))
    if dist.measure_ball(x, hi) < p:  # numerical guard; full support is covered
        hi *= 1.0 + 1e-9
    lo = 0.0
    goal = min(tol, _BISECT_TOL) if tol > 0 else _BISECT_TOL
    while hi - lo > min(goal, tol):
        mid = 0.5 * (lo + hi)
        if dist.measure_ball(x, mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# splitting numbers
# ---------------------------------------------------------------------------


def _critical_points_1d(X: np.ndarray) -> np.ndarray:
    xs = X[:, 0]
    crit = set(xs.tolist())
    for a, b in itertools.combinations(xs.tolist(), 2):
        crit.add(0.5 * (a + b))
    crit = np.array(sorted(crit))
    # Interval representatives on both sides of every critical value.
    mids = 0.5 * (crit[:-1] + crit[1:]) if crit.size > 1 else np.array([])
    lo, hi = crit[0] - 1.0, crit[-1] + 1.0
    return np.concatenate([crit, mids, [lo, hi]])[:, None]


def _critical_points_2d(X: np.ndarray) -> np.ndarray:
    pts = [X]
    pairs = list(itertools.combinations(range(X.shape[0]), 2))
    mids = np.array([0.5 * (X[i] + X[j]) for i, j in pairs]) if pairs else np.empty((0, 2))
    if mids.size:
        pts.append(mids)
    # Bisector of (i, j): 2(xj - xi) . x = |xj|^2 - |xi|^2.  Pairwise line
    # intersections hit every vertex of the order arrangement.
    lines = []
    for i, j in pairs:
        a = 2.0 * (X[j] - X[i])
        b = float(X[j] @ X[j] - X[i] @ X[i])
        lines.append((a, b))
    inter = []
    for (a1, b1), (a2, b2) in itertools.combinations(lines, 2):
        mat = np.stack([a1, a2])
        det = float(np.linalg.det(mat))
        if abs(det) > 1e-12:
            inter.append(np.linalg.solve(mat, np.array([b1, b2])))
    if inter:
        pts.append(np.array(inter))
    return np.concatenate(pts, axis=0)


def _fallback_grid(X: np.ndarray, per_axis: int) -> np.ndarray:
    lo = X.min(axis=0) - 1.0
    hi = X.max(axis=0) + 1.0
    axes = [np.linspace(lo[j], hi[j], per_axis) for j in range(X.shape[1])]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _collect_subsets(clf, candidates: np.ndarray) -> set[frozenset[int]]:
    X = clf.dataset.X
    found: set[frozenset[int]] = {frozenset()}  # realized below the minimum distance
    for q in candidates:
        d = np.linalg.norm(X - q, axis=1)
        w = clf.weights(q)
        order = np.argsort(d, kind="stable")
        alpha_sets = []
        for alpha in np.unique(d):
            alpha_sets.append(frozenset(np.flatnonzero(d <= alpha).tolist()))
        beta_sets = [frozenset(range(X.shape[0]))]  # beta = 0 keeps everyone
        for beta in np.unique(w):
            if beta > 0.0:
                beta_sets.append(frozenset(np.flatnonzero(w >= beta).tolist()))
        for a_set in alpha_sets:
            for b_set in beta_sets:
                found.add(a_set & b_set)
    return found


def splitting_number_bruteforce(clf, max_n: int = 12, grid_per_axis: int = 24) -> SplittingEnumeration:
    """Exact-up-to-grid enumeration of the distinct threshold-cut index sets.

    Candidate queries come from the critical arrangement (samples, pairwise
    midpoints, bisector crossings) plus a dense fallback grid; the count is
    flagged stable when doubling the fallback grid leaves it unchanged.
    """
    dataset = clf.dataset
    n, d = len(dataset), dataset.dim
    if max_n > 12:
        raise EnumerationTooLarge("enumeration guard caps max_n at 12")
    if n > max_n or d > 2:
        raise EnumerationTooLarge(f"n={n}, d={d} exceeds the brute-force guard")
    crit = _critical_points_1d(dataset.X) if d == 1 else _critical_points_2d(dataset.X)
    base = _collect_subsets(clf, np.concatenate([crit, _fallback_grid(dataset.X, grid_per_axis)]))
    dense = _collect_subsets(clf, _fallback_grid(dataset.X, 2 * grid_per_axis))
    subsets = frozenset(base | dense)
    stable = dense <= base
    return SplittingEnumeration(subsets, len(subsets), n, d, stable)


# ---------------------------------------------------------------------------
# condition estimators
# ---------------------------------------------------------------------------


def _query_domain(dist: DataDistribution, per_axis: int) -> np.ndarray:
    """Grid over the experiment's compact domain: the support bounding box
    inflated by half the support diameter on every side."""
    lo, hi = dist.support_bounds()
    diam = float(np.linalg.norm(hi - lo))
    pad = 0.5 * diam if diam > 0 else 1.0
    axes = [np.linspace(lo[j] - pad, hi[j] + pad, per_axis) for j in range(lo.shape[0])]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def estimate_condition2(
    clf, dist: DataDistribution, p: float, grid: int = 256
) -> ConditionEstimate:
    """Max over a query grid of the weight mass falling outside the query's
    probability-radius ball; a grid lower bound on the supremum."""
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie in (0, 1)")
    pts = _query_domain(dist, grid)
    X = clf.dataset.X
    worst = 0.0
    for q in pts:
        r = probability_radius(dist, q, p)
        w = clf.weights(q)
        d = np.linalg.norm(X - q, axis=1)
        worst = max(worst, float(w[d > r].sum()))
    return ConditionEstimate("cond2", len(clf.dataset), worst, grid, clf.dataset.seed, p=p)


def estimate_condition3(clf, t_n: float, grid: int = 256,
                        dist: DataDistribution | None = None) -> ConditionEstimate:
    """t_n times the largest single-sample weight any query can receive.

    Exact for k-NN (t_n / k) and histograms (t_n over the smallest nonempty
    leaf count); kernel classifiers are evaluated on the query grid, which
    needs the distribution to define the domain.
    """
    n = len(clf.dataset)
    seed = clf.dataset.seed
    if isinstance(clf, KNNClassifier):
        return ConditionEstimate("cond3", n, t_n / clf.k, None, seed)
    if isinstance(clf, HistogramClassifier):
        smallest = min(leaf.count for leaf in clf.leaves() if leaf.count > 0)
        return ConditionEstimate("cond3", n, t_n / smallest, None, seed)
    if not isinstance(clf, KernelClassifier):
        raise TypeError(f"no max-weight estimator for {type(clf).__name__}")
    if dist is None:
        raise ValueError("kernel estimation needs the distribution to fix the query domain")
    pts = _query_domain(dist, grid)
    worst = 0.0
    for q in pts:
        worst = max(worst, float(clf.weights(q).max()))
    return ConditionEstimate("cond3", n, t_n * worst, grid, seed)
