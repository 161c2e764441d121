"""Astuteness certification: grid search over robustness regions backed by a
kernel flip bound that rules out sign changes between grid points.

A test point is astute when the classifier is correct at the point itself and
provably constant over its robustness region.  Kernel classifiers get a
two-part certificate (grid + perturbation bound with local step refinement);
k-NN and histogram classifiers get the grid plus a cheap boundary-distance
check, falling back to grid-only confidence with a flag.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .classifiers import HistogramClassifier, KernelClassifier, KNNClassifier
from .distributions import DataDistribution, Dataset, SupportSide, derive_seed
from .geometry import as_point
from .regions import RobustnessRegion, make_region

__all__ = [
    "FlipBoundVerdict",
    "CertResult",
    "PointOutcome",
    "AstutenessReport",
    "neighborhood_bayes_predict",
    "NeighborhoodBayesFamily",
    "NeighborhoodBayesClassifier",
    "kernel_flip_bound",
    "certify_astute",
    "empirical_astuteness",
    "empirical_accuracy",
    "evaluate_cell",
]

# Flat per-certification probe budget; exhausting it is a conservative
# failure, identical in effect to exhausting the refinement rounds.  A flat
# cap (rather than one scaled to region size) keeps certification monotone
# under region nesting.
PROBE_BUDGET = 250_000

MAX_REFINEMENTS = 4


class FlipBoundVerdict(enum.Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class CertResult:
    astute: bool
    accurate_at_anchor: bool
    robust: bool
    counterexample: np.ndarray | None
    grid_points_checked: int
    flip_bound_used: bool
    refined_steps: int
    grid_only: bool = False

    def __post_init__(self):
        assert self.astute == (self.accurate_at_anchor and self.robust)


@dataclass(frozen=True, eq=False)
class PointOutcome:
    anchor: np.ndarray
    label: int
    trial: int
    result: CertResult


@dataclass(frozen=True, eq=False)
class AstutenessReport:
    """Aggregate astuteness/accuracy over labeled test draws.

    Fractions are over all test points; the mean/std pairs are computed
    across trials (sample standard deviation, 0 when only one trial ran).
    """

    per_point: list[PointOutcome]
    astuteness: float
    accuracy: float
    trials: int
    per_trial_astuteness: list[float]
    per_trial_accuracy: list[float]
    astuteness_mean: float
    astuteness_std: float
    accuracy_mean: float
    accuracy_std: float
    seed: int

    def __post_init__(self):
        assert self.astuteness <= self.accuracy + 1e-12


def _trial_stats(values: list[float]) -> tuple[float, float]:
    if len(values) >= 2:
        return float(np.mean(values)), float(np.std(values, ddof=1))
    return float(values[0]) if values else 0.0, 0.0


# ---------------------------------------------------------------------------
# the distance-rule reference classifier
# ---------------------------------------------------------------------------


def neighborhood_bayes_predict(dist: DataDistribution, x) -> int:
    """+1 iff x is at least as close to the positive support as to the
    negative one (ties go positive); defined on all of R^d."""
    x = as_point(x)
    d_pos = dist.support_distance(SupportSide.POS, x)
    d_neg = dist.support_distance(SupportSide.NEG, x)
    return 1 if d_pos <= d_neg else -1


class NeighborhoodBayesClassifier:
    """Reference classifier built from the distribution's support geometry;
    used as the known-optimal baseline in consistency experiments."""

    def __init__(self, dist: DataDistribution):
        self.dist = dist

    def predict(self, x) -> int:
        return neighborhood_bayes_predict(self.dist, x)

    def predict_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        d_pos = self.dist.support_distance_many(SupportSide.POS, pts)
        d_neg = self.dist.support_distance_many(SupportSide.NEG, pts)
        return np.where(d_pos <= d_neg, 1, -1).astype(np.int64)

    def boundary_margin_many(self, pts: np.ndarray) -> np.ndarray:
        # The prediction flips only on the equidistance surface; moving by
        # delta changes each distance by at most delta.
        pts = np.atleast_2d(pts)
        d_pos = self.dist.support_distance_many(SupportSide.POS, pts)
        d_neg = self.dist.support_distance_many(SupportSide.NEG, pts)
        return 0.5 * np.abs(d_pos - d_neg)


@dataclass(frozen=True)
class NeighborhoodBayesFamily:
    dist: DataDistribution

    @property
    def label(self) -> str:
        return "neighbor_bayes"

    def fit(self, dataset: Dataset) -> NeighborhoodBayesClassifier:
        return NeighborhoodBayesClassifier(self.dist)


# ---------------------------------------------------------------------------
# kernel flip bound
# ---------------------------------------------------------------------------


def kernel_flip_bound(clf: KernelClassifier, x, radius: float) -> FlipBoundVerdict:
    """Certified iff the margin at x strictly exceeds a proven upper bound on
    the margin change over every point within the radius."""
    if radius < 0.0:
        raise ValueError("radius must be non-negative")
    q = as_point(x)[None, :]
    m, bound = clf.margins_and_flip_bounds(q, radius)
    if m[0] != 0.0 and abs(m[0]) > bound[0]:
        return FlipBoundVerdict.CERTIFIED
    return FlipBoundVerdict.INCONCLUSIVE


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


def _child_stencil(dim: int) -> np.ndarray:
    # Integer offsets o with |o| <= 2.5 * sqrt(d).  Children of a lattice
    # point k at spacing s are 2k + o at spacing s/2; every point of the
    # parent ball B(g, s*sqrt(d)) then lies within (s/2)*sqrt(d) of a child.
    reach = int(math.floor(2.5 * math.sqrt(dim)))
    axes = [np.arange(-reach, reach + 1)] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    offs = np.stack([m.ravel() for m in mesh], axis=1)
    return offs[(offs**2).sum(axis=1) <= 6.25 * dim]


def _first_lex(pts: np.ndarray) -> np.ndarray:
    order = np.lexsort(tuple(pts[:, j] for j in reversed(range(pts.shape[1]))))
    return pts[order[0]]


@dataclass
class _KernelCertOutcome:
    robust: bool
    counterexample: np.ndarray | None
    probes: int
    flip_bound_used: bool
    refined_steps: int


def _certify_kernel_region(
    clf: KernelClassifier,
    region: RobustnessRegion,
    step: float,
    anchor_pred: int,
    probe_budget: int,
    max_refinements: int,
) -> _KernelCertOutcome:
    dim = region.dim
    sqrt_d = math.sqrt(dim)
    box = region.bounding_box()
    offsets = region.lattice_offsets(step, box)
    pts = region.anchor + offsets * step
    offsets = offsets[region.contains_many(pts)]
    stencil = _child_stencil(dim)
    probes = 0
    level = 0
    while True:
        spacing = step / (1 << level)
        radius = spacing * sqrt_d
        pts = region.anchor + offsets * spacing
        probes += pts.shape[0]
        if probes > probe_budget:
            return _KernelCertOutcome(False, None, probes, True, level)
        margins, bounds = clf.margins_and_flip_bounds(pts, radius)
        signs = np.where(margins > 0.0, 1, -1)
        flipped = signs != anchor_pred
        if flipped.any():
            in_region = region.contains_many(pts[flipped])
            if in_region.any():
                cex = _first_lex(pts[flipped][in_region])
                return _KernelCertOutcome(False, cex, probes, level > 0, level)
        certified = ~flipped & (np.abs(margins) > bounds) & (margins != 0.0)
        pending = ~certified
        if not pending.any():
            return _KernelCertOutcome(True, None, probes, True, level)
        if level == max_refinements:
            return _KernelCertOutcome(False, None, probes, True, level)
        # Refine locally: halve the lattice around every unresolved probe.
        kids = (2 * offsets[pending])[:, None, :] + stencil[None, :, :]
        kids = np.unique(kids.reshape(-1, dim), axis=0)
        child_spacing = spacing / 2.0
        child_radius = child_spacing * sqrt_d
        child_pts = region.anchor + kids * child_spacing
        # Drop children whose ball provably misses the region: the region
        # margin is (1 + kappa)-Lipschitz.
        margin = region.margin_many(child_pts)
        keep = margin > -(1.0 + region.kappa) * child_radius
        offsets = kids[keep]
        level += 1


def _certify_grid_family(clf, region: RobustnessRegion, step: float, anchor_pred: int):
    grid = region.grid(step)
    preds = clf.predict_many(grid)
    flipped = preds != anchor_pred
    if flipped.any():
        cex = _first_lex(grid[flipped])
        return False, cex, grid.shape[0], True
    margin_fn = getattr(clf, "boundary_margin_many", None)
    if margin_fn is None:
        return True, None, grid.shape[0], True
    margins = margin_fn(grid)
    grid_only = not (step < 0.5 * float(np.min(margins)))
    return True, None, grid.shape[0], grid_only


def certify_astute(
    clf,
    dist: DataDistribution,
    x,
    y: int,
    kappa: float,
    step: float,
    probe_budget: int = PROBE_BUDGET,
    max_refinements: int = MAX_REFINEMENTS,
) -> CertResult:
    """Certify accuracy and robustness of clf at (x, y) over the kappa-region.

    Kernel classifiers must additionally pass the flip bound at every grid
    point (radius step * sqrt(d)); when the bound is inconclusive somewhere,
    the step is halved locally up to max_refinements times, after which the
    point fails conservatively (robust = False without a counterexample).
    """
    x = as_point(x)
    region = make_region(dist, x, kappa)
    anchor_pred = clf.predict(x)
    accurate = anchor_pred == int(y)
    if region.degenerate:
        # The region is the single point x: robustness is trivial.
        return CertResult(accurate, accurate, True, None, 1, False, 0)
    if isinstance(clf, KernelClassifier):
        out = _certify_kernel_region(
            clf, region, step, anchor_pred, probe_budget, max_refinements
        )
        return CertResult(
            accurate and out.robust,
            accurate,
            out.robust,
            out.counterexample,
            out.probes,
            out.flip_bound_used,
            out.refined_steps,
        )
    robust, cex, checked, grid_only = _certify_grid_family(clf, region, step, anchor_pred)
    return CertResult(
        accurate and robust, accurate, robust, cex, checked, False, 0, grid_only
    )


# ---------------------------------------------------------------------------
# empirical protocols
# ---------------------------------------------------------------------------


def evaluate_cell(
    family,
    dist: DataDistribution,
    n: int,
    kappas: tuple[float, ...],
    test_points: int,
    trials: int,
    seed: int,
    step: float = 0.01,
) -> tuple[dict[float, AstutenessReport], AstutenessReport]:
    """Run the trial protocol once and score every kappa plus plain accuracy
    on the same training/test draws.

    Sharing draws across kappas and the accuracy baseline is what makes
    nesting monotonicity and the astuteness <= accuracy ordering hold
    pointwise in emitted results.  Trial t draws its training set with child
    seed (seed, t, 0) and its test set with (seed, t, 1).
    """
    per_kappa: dict[float, list[PointOutcome]] = {k: [] for k in kappas}
    acc_outcomes: list[PointOutcome] = []
    per_trial_ast: dict[float, list[float]] = {k: [] for k in kappas}
    per_trial_acc: list[float] = []
    for trial in range(trials):
        train = dist.sample(n, derive_seed(seed, trial, 0))
        test = dist.sample(test_points, derive_seed(seed, trial, 1))
        clf = family.fit(train)
        correct = 0
        astute_counts = {k: 0 for k in kappas}
        for i in range(len(test)):
            anchor = test.X[i]
            label = int(test.y[i])
            pred = clf.predict(anchor)
            acc = pred == label
            correct += acc
            acc_outcomes.append(
                PointOutcome(
                    anchor, label, trial, CertResult(acc, acc, True, None, 0, False, 0)
                )
            )
            for k in kappas:
                res = certify_astute(clf, dist, anchor, label, k, step)
                astute_counts[k] += res.astute
                per_kappa[k].append(PointOutcome(anchor, label, trial, res))
        per_trial_acc.append(correct / test_points)
        for k in kappas:
            per_trial_ast[k].append(astute_counts[k] / test_points)

    acc_mean, acc_std = _trial_stats(per_trial_acc)
    overall_acc = float(np.mean(per_trial_acc))
    accuracy_report = AstutenessReport(
        acc_outcomes,
        overall_acc,
        overall_acc,
        trials,
        per_trial_acc,
        per_trial_acc,
        acc_mean,
        acc_std,
        acc_mean,
        acc_std,
        seed,
    )
    reports = {}
    for k in kappas:
        ast_mean, ast_std = _trial_stats(per_trial_ast[k])
        reports[k] = AstutenessReport(
            per_kappa[k],
            float(np.mean(per_trial_ast[k])),
            overall_acc,
            trials,
            per_trial_ast[k],
            per_trial_acc,
            ast_mean,
            ast_std,
            acc_mean,
            acc_std,
            seed,
        )
    return reports, accuracy_report


def empirical_astuteness(
    family,
    dist: DataDistribution,
    n: int,
    kappa: float,
    test_points: int,
    trials: int,
    seed: int,
    step: float = 0.01,
) -> AstutenessReport:
    reports, _ = evaluate_cell(family, dist, n, (kappa,), test_points, trials, seed, step)
    return reports[kappa]


def empirical_accuracy(
    family,
    dist: DataDistribution,
    n: int,
    test_points: int,
    trials: int,
    seed: int,
) -> AstutenessReport:
    _, acc = evaluate_cell(family, dist, n, (), test_points, trials, seed)
    return acc
