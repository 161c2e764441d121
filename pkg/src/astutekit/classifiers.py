"""Weight-function classifiers: k-nearest neighbors, kernel similarity,
and recursive-histogram partitions.

Each family fits a dataset into an immutable classifier whose per-query
weight vector depends only on sample locations (and tie-break keys), never
on labels.  Prediction is the sign rule: +1 iff the weighted label sum is
strictly positive, -1 on ties and on all-zero weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distributions import Dataset
from .errors import EmptyDataset, KTooLarge, NTooSmall

__all__ = [
    "KSchedule",
    "LogCeil",
    "PowerLaw",
    "FixedK",
    "BandwidthRule",
    "KernelId",
    "KernelSpec",
    "KNNFamily",
    "KernelFamily",
    "HistogramFamily",
    "KNNClassifier",
    "KernelClassifier",
    "HistogramClassifier",
]

# Target element count for query-by-sample distance blocks (~32 MB float64).
_CHUNK_ELEMS = 4_000_000

# Histogram cells stop splitting past this depth even when over-full
# (duplicate-heavy data would otherwise recurse forever).
_MAX_SPLIT_DEPTH = 64


# ---------------------------------------------------------------------------
# neighbor-count and bandwidth schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogCeil:
    """k_n = ceil(c * log2 n), clamped to [1, n]."""

    c: float = 1.0

    def resolve(self, n: int) -> int:
        if n < 2:
            raise NTooSmall("schedules need n >= 2")
        return max(1, min(n, math.ceil(self.c * math.log2(n))))

    def __str__(self) -> str:
        return f"logceil({self.c:g})"


@dataclass(frozen=True)
class PowerLaw:
    """k_n = ceil(n ** p) for 0 < p < 1, clamped to [1, n]."""

    p: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError("power exponent must lie in (0, 1)")

    def resolve(self, n: int) -> int:
        if n < 2:
            raise NTooSmall("schedules need n >= 2")
        return max(1, min(n, math.ceil(n**self.p)))

    def __str__(self) -> str:
        return f"pow({self.p:g})"


@dataclass(frozen=True)
class FixedK:
    k: int

    def resolve(self, n: int) -> int:
        return self.k

    def __str__(self) -> str:
        return f"k={self.k}"


KSchedule = LogCeil | PowerLaw | FixedK


class BandwidthRule(enum.Enum):
    # h_n = 1 / (10 * sqrt(ln n))
    SQRT_LOG = "sqrt_log"
    # h_n = 1 / (10 * n ** (1/3))
    CUBE_ROOT = "cube_root"
    FIXED = "fixed"


class KernelId(enum.Enum):
    EXPONENTIAL = "exponential"  # K(u) = exp(-u)
    GAUSSIAN = "gaussian"        # K(u) = exp(-u^2)
    POLYNOMIAL = "polynomial"    # K(u) = 1 / (1 + u^2)


@dataclass(frozen=True)
class KernelSpec:
    kernel_id: KernelId
    rule: BandwidthRule
    fixed_h: float | None = None

    def __post_init__(self):
        if self.rule is BandwidthRule.FIXED and not (self.fixed_h and self.fixed_h > 0):
            raise ValueError("fixed bandwidth must be positive")

    def bandwidth(self, n: int) -> float:
        if self.rule is BandwidthRule.FIXED:
            return float(self.fixed_h)
        if n < 2:
            raise NTooSmall("bandwidth schedules need n >= 2")
        if self.rule is BandwidthRule.SQRT_LOG:
            return 1.0 / (10.0 * math.sqrt(math.log(n)))
        return 1.0 / (10.0 * n ** (1.0 / 3.0))

    def __str__(self) -> str:
        if self.rule is BandwidthRule.FIXED:
            return f"{self.kernel_id.value}(h={self.fixed_h:g})"
        return f"{self.kernel_id.value}({self.rule.value})"


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def _check_nonempty(dataset: Dataset) -> None:
    if len(dataset) == 0:
        raise EmptyDataset("cannot fit a classifier to zero samples")


@dataclass(frozen=True)
class KNNFamily:
    schedule: KSchedule

    @property
    def label(self) -> str:
        return f"knn[{self.schedule}]"

    def fit(self, dataset: Dataset) -> "KNNClassifier":
        _check_nonempty(dataset)
        k = self.schedule.resolve(len(dataset)) if len(dataset) >= 2 else 1
        return KNNClassifier(dataset, k)


@dataclass(frozen=True)
class KernelFamily:
    spec: KernelSpec

    @property
    def label(self) -> str:
        return f"kernel[{self.spec}]"

    def fit(self, dataset: Dataset) -> "KernelClassifier":
        _check_nonempty(dataset)
        return KernelClassifier(dataset, self.spec, self.spec.bandwidth(len(dataset)))


@dataclass(frozen=True)
class HistogramFamily:
    schedule: KSchedule

    @property
    def label(self) -> str:
        return f"hist[{self.schedule}]"

    def fit(self, dataset: Dataset) -> "HistogramClassifier":
        _check_nonempty(dataset)
        k = self.schedule.resolve(len(dataset)) if len(dataset) >= 2 else 1
        return HistogramClassifier(dataset, max(1, k))


# ---------------------------------------------------------------------------
# k-nearest neighbors
# ---------------------------------------------------------------------------


class KNNClassifier:
    """Exact k-NN with deterministic tie breaking.

    Distance ties are resolved by the dataset's per-sample uniform keys
    (smaller key counts as closer), so the selected neighbor set is a pure
    function of (locations, keys, query).
    """

    def __init__(self, dataset: Dataset, k: int):
        n = len(dataset)
        if k > n:
            raise KTooLarge(f"k={k} exceeds dataset size {n}")
        if k < 1:
            raise ValueError("k must be at least 1")
        self.dataset = dataset
        self.k = int(k)
        self._one_d = dataset.dim == 1
        if self._one_d:
            order = np.argsort(dataset.X[:, 0], kind="stable")
            self._order = order
            self._xs = dataset.X[order, 0]
            self._keys = dataset.tiebreak_keys[order]
            self._ys = dataset.y[order]

    @property
    def label_values(self) -> np.ndarray:
        return self.dataset.y

    def _select_1d(self, q: float) -> tuple[np.ndarray, float, float]:
        """Neighbor indices (sorted-order positions), k-th and (k+1)-th distances."""
        xs, keys = self._xs, self._keys
        n = xs.shape[0]
        k = self.k
        lo = max(0, np.searchsorted(xs, q) - k - 1)
        hi = min(n, lo + 2 * (k + 1) + 2)
        lo = max(0, hi - 2 * (k + 1) - 2)
        idx = np.arange(lo, hi)
        d = np.abs(xs[idx] - q)
        # Ties at the selection boundary may extend past the window; distance
        # ties in 1-D mean exact coordinate matches, which the window already
        # covers unless duplicates run long.  Extend while edge values tie.
        kth = np.partition(d, min(k - 1, d.size - 1))[min(k - 1, d.size - 1)]
        while lo > 0 and abs(xs[lo - 1] - q) <= kth:
            lo -= 1
            idx = np.arange(lo, hi)
            d = np.abs(xs[idx] - q)
        while hi < n and abs(xs[hi] - q) <= kth:
            hi += 1
            idx = np.arange(lo, hi)
            d = np.abs(xs[idx] - q)
        sel = np.lexsort((keys[idx], d))
        chosen = idx[sel[:k]]
        d_sorted = d[sel]
        d_k = float(d_sorted[k - 1])
        d_k1 = float(d_sorted[k]) if d_sorted.size > k else math.inf
        return chosen, d_k, d_k1

    def _select_generic(self, q: np.ndarray) -> tuple[np.ndarray, float, float]:
        d = np.linalg.norm(self.dataset.X - q, axis=1)
        sel = np.lexsort((self.dataset.tiebreak_keys, d))
        d_sorted = d[sel]
        d_k = float(d_sorted[self.k - 1])
        d_k1 = float(d_sorted[self.k]) if d_sorted.size > self.k else math.inf
        return sel[: self.k], d_k, d_k1

    def _neighbors(self, q: np.ndarray) -> tuple[np.ndarray, float, float]:
        if self._one_d:
            pos, d_k, d_k1 = self._select_1d(float(q[0]))
            return self._order[pos], d_k, d_k1
        return self._select_generic(q)

    def weights(self, x) -> np.ndarray:
        """Exactly k entries of 1/k, aligned with the fitted dataset order."""
        q = np.atleast_1d(np.asarray(x, dtype=np.float64))
        idx, _, _ = self._neighbors(q)
        w = np.zeros(len(self.dataset))
        w[idx] = 1.0 / self.k
        return w

    def predict(self, x) -> int:
        q = np.atleast_1d(np.asarray(x, dtype=np.float64))
        idx, _, _ = self._neighbors(q)
        return 1 if self.dataset.y[idx].sum() > 0 else -1

    def predict_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.empty(pts.shape[0], dtype=np.int64)
        for i, q in enumerate(pts):
            out[i] = self.predict(q)
        return out

    def boundary_margin_many(self, pts: np.ndarray) -> np.ndarray:
        """Per-query lower bound on the distance to the nearest point where
        the selected neighbor set can change: half the gap between the k-th
        and (k+1)-th neighbor distances."""
        pts = np.atleast_2d(pts)
        out = np.empty(pts.shape[0])
        for i, q in enumerate(pts):
            if self.k == len(self.dataset):
                out[i] = math.inf
                continue
            _, d_k, d_k1 = self._neighbors(np.asarray(q, dtype=np.float64))
            out[i] = 0.5 * (d_k1 - d_k)
        return out


# ---------------------------------------------------------------------------
# kernel similarity
# ---------------------------------------------------------------------------


def _pairwise_distances(queries: np.ndarray, X: np.ndarray, xx: np.ndarray) -> np.ndarray:
    qq = np.einsum("ij,ij->i", queries, queries)
    d2 = qq[:, None] + xx[None, :] - 2.0 * (queries @ X.T)
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2, out=d2)


class KernelClassifier:
    """Kernel-similarity weight function w_i(x) proportional to K(rho(x, x_i)/h).

    Exponential and Gaussian weights are evaluated in the log domain with a
    per-query shift so normalization never underflows; if a polynomial-kernel
    query still underflows to an all-zero weight vector, the classifier falls
    back to 1-nearest-neighbor weighting and counts the event.
    """

    def __init__(self, dataset: Dataset, spec: KernelSpec, h: float):
        self.dataset = dataset
        self.spec = spec
        self.h = float(h)
        self._X = dataset.X
        self._y = dataset.y.astype(np.float64)
        self._xx = np.einsum("ij,ij->i", self._X, self._X)
        self._pos = (dataset.y == 1).astype(np.float64)
        self._neg = (dataset.y == -1).astype(np.float64)
        self.underflow_fallbacks = 0

    # -- margins ------------------------------------------------------------

    def _chunks(self, pts: np.ndarray):
        n = self._X.shape[0]
        step = max(1, _CHUNK_ELEMS // max(n, 1))
        for start in range(0, pts.shape[0], step):
            yield start, pts[start : start + step]

    def margins_many(self, pts: np.ndarray) -> np.ndarray:
        m, _ = self.margins_and_flip_bounds(np.atleast_2d(pts), radius=None)
        return m

    def margins_and_flip_bounds(
        self, pts: np.ndarray, radius: float | None
    ) -> tuple[np.ndarray, np.ndarray | None]:
        """Normalized margins m(x) = sum_i w_i(x) y_i, and (when a radius is
        given) a sound upper bound on |m(x') - m(x)| over rho(x, x') <= radius.

        The bound tracks each unnormalized weight's worst-case change
        |K'|_sup * radius / h over its realized distance interval, splits the
        numerator change by label sign, and lower-bounds the perturbed
        normalizer by sum_i K((rho_i + radius)/h).
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        m = np.empty(pts.shape[0])
        bounds = np.empty(pts.shape[0]) if radius is not None else None
        for start, chunk in self._chunks(pts):
            dist = _pairwise_distances(chunk, self._X, self._xx)
            t = dist / self.h
            mc, bc = self._margins_chunk(t, radius)
            stop = start + chunk.shape[0]
            m[start:stop] = mc
            if bounds is not None:
                bounds[start:stop] = bc
        return m, bounds

    def _margins_chunk(self, t: np.ndarray, radius: float | None):
        kid = self.spec.kernel_id
        r_h = (radius / self.h) if radius is not None else 0.0
        if kid is KernelId.EXPONENTIAL:
            shift = t.min(axis=1, keepdims=True)
            u = np.exp(shift - t)
            denom = u.sum(axis=1)
            m = (u @ self._y) / denom
            if radius is None:
                return m, None
            # For K(u) = exp(-u): |K'|_sup over the interval is at most
            # exp(r/h) * K(rho/h), and the shrunken normalizer is exactly
            # exp(-r/h) times the original, so the per-weight bound collapses
            # to (r/h) * exp(2r/h) * (1 - m^2) with no second kernel pass.
            b = (r_h * math.exp(2.0 * r_h)) * (1.0 - m * m)
            return m, b
        if kid is KernelId.GAUSSIAN:
            t2 = t * t
            shift = t2.min(axis=1, keepdims=True)
            u = np.exp(shift - t2)
            denom = u.sum(axis=1)
            m = (u @ self._y) / denom
            if radius is None:
                return m, None
            a = np.maximum(t - r_h, 0.0)
            b_edge = t + r_h
            peak = math.sqrt(0.5)  # argmax of 2u*exp(-u^2)
            tc = np.clip(peak, a, b_edge)
            lsup = 2.0 * tc * np.exp(shift - tc * tc)
            denom_min = np.exp(shift - b_edge * b_edge).sum(axis=1)
            return m, self._split_bound(lsup, denom_min, m, r_h)
        # polynomial K(u) = 1 / (1 + u^2)
        u = 1.0 / (1.0 + t * t)
        denom = u.sum(axis=1)
        bad = denom == 0.0
        m = np.divide(u @ self._y, denom, out=np.zeros_like(denom), where=~bad)
        if bad.any():
            self.underflow_fallbacks += int(bad.sum())
            m[bad] = [self._nearest_label(ti) for ti in t[bad]]
        if radius is None:
            return m, None
        a = np.maximum(t - r_h, 0.0)
        b_edge = t + r_h
        peak = 1.0 / math.sqrt(3.0)  # argmax of 2u/(1+u^2)^2
        tc = np.clip(peak, a, b_edge)
        lsup = 2.0 * tc / (1.0 + tc * tc) ** 2
        denom_min = (1.0 / (1.0 + b_edge * b_edge)).sum(axis=1)
        return m, self._split_bound(lsup, denom_min, m, r_h)

    def _split_bound(self, lsup, denom_min, m, r_h):
        lp = lsup @ self._pos
        lm = lsup @ self._neg
        return r_h * (np.abs(1.0 - m) * lp + np.abs(1.0 + m) * lm) / denom_min

    def _nearest_label(self, t_row: np.ndarray) -> float:
        order = np.lexsort((self.dataset.tiebreak_keys, t_row))
        return float(self.dataset.y[order[0]])

    # -- public classifier surface -------------------------------------------

    def weights(self, x) -> np.ndarray:
        q = np.atleast_2d(np.asarray(x, dtype=np.float64))
        t = _pairwise_distances(q, self._X, self._xx)[0] / self.h
        kid = self.spec.kernel_id
        if kid is KernelId.EXPONENTIAL:
            lu = -t
        elif kid is KernelId.GAUSSIAN:
            lu = -(t * t)
        else:
            u = 1.0 / (1.0 + t * t)
            s = u.sum()
            if s == 0.0:
                self.underflow_fallbacks += 1
                w = np.zeros_like(u)
                order = np.lexsort((self.dataset.tiebreak_keys, t))
                w[order[0]] = 1.0
                return w
            return u / s
        lu -= lu.max()
        u = np.exp(lu)
        return u / u.sum()

    def predict(self, x) -> int:
        m = self.margins_many(np.atleast_1d(np.asarray(x, dtype=np.float64))[None, :])
        return 1 if m[0] > 0.0 else -1

    def predict_many(self, pts: np.ndarray) -> np.ndarray:
        m = self.margins_many(pts)
        return np.where(m > 0.0, 1, -1).astype(np.int64)


# ---------------------------------------------------------------------------
# recursive histogram
# ---------------------------------------------------------------------------


class _Cell:
    __slots__ = ("lo", "hi", "idx", "children", "label_sum", "count")

    def __init__(self, lo, hi, idx):
        self.lo = lo
        self.hi = hi
        self.idx = idx
        self.children = None
        self.count = idx.size
        self.label_sum = 0

    def is_leaf(self) -> bool:
        return self.children is None


class HistogramClassifier:
    """Recursive 2^d hypercube partition; leaves hold at most k samples.

    The root is the smallest axis-aligned hypercube containing the sample,
    centered on the sample bounding box with a 1e-9 relative side padding.
    Cells are half-open [lo, hi) per axis except on the root's upper faces,
    so the children partition each parent exactly.  Queries outside the root
    or in an empty leaf get an all-zero weight vector (prediction -1).
    """

    def __init__(self, dataset: Dataset, k: int):
        self.dataset = dataset
        self.k = int(k)
        self.saturated = False  # a leaf hit the depth cap while over-full
        X = dataset.X
        lo, hi = X.min(axis=0), X.max(axis=0)
        side = float((hi - lo).max()) * (1.0 + 1e-9)
        center = 0.5 * (lo + hi)
        self.root_lo = center - 0.5 * side
        self.root_hi = center + 0.5 * side
        self.root = _Cell(self.root_lo, self.root_hi, np.arange(len(dataset)))
        self._build(self.root, depth=0)

    def _build(self, cell: _Cell, depth: int) -> None:
        cell.label_sum = int(self.dataset.y[cell.idx].sum())
        if cell.count <= self.k:
            return
        if depth >= _MAX_SPLIT_DEPTH:
            self.saturated = True
            return
        d = self.dataset.dim
        mid = 0.5 * (cell.lo + cell.hi)
        pts = self.dataset.X[cell.idx]
        codes = ((pts >= mid) << np.arange(d)).sum(axis=1)
        children = []
        for code in range(1 << d):
            sel = np.where(codes == code)[0]
            clo = cell.lo.copy()
            chi = cell.hi.copy()
            for j in range(d):
                if (code >> j) & 1:
                    clo[j] = mid[j]
                else:
                    chi[j] = mid[j]
            child = _Cell(clo, chi, cell.idx[sel])
            children.append(child)
        cell.children = children
        for child in children:
            self._build(child, depth + 1)

    def _locate(self, q: np.ndarray) -> _Cell | None:
        if np.any(q < self.root_lo) or np.any(q > self.root_hi):
            return None
        cell = self.root
        d = q.shape[0]
        while not cell.is_leaf():
            mid = 0.5 * (cell.lo + cell.hi)
            code = int(((q >= mid) << np.arange(d)).sum())
            cell = cell.children[code]
        return cell

    def leaves(self):
        stack = [self.root]
        while stack:
            cell = stack.pop()
            if cell.is_leaf():
                yield cell
            else:
                stack.extend(cell.children)

    def weights(self, x) -> np.ndarray:
        q = np.atleast_1d(np.asarray(x, dtype=np.float64))
        w = np.zeros(len(self.dataset))
        cell = self._locate(q)
        if cell is not None and cell.count:
            w[cell.idx] = 1.0 / cell.count
        return w

    def predict(self, x) -> int:
        q = np.atleast_1d(np.asarray(x, dtype=np.float64))
        cell = self._locate(q)
        if cell is None or cell.count == 0:
            return -1
        return 1 if cell.label_sum > 0 else -1

    def predict_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.empty(pts.shape[0], dtype=np.int64)
        for i, q in enumerate(pts):
            out[i] = self.predict(np.asarray(q, dtype=np.float64))
        return out

    def boundary_margin_many(self, pts: np.ndarray) -> np.ndarray:
        """Distance from each query to the nearest face of its cell (or to
        the root box when outside); the prediction is constant closer than
        this."""
        pts = np.atleast_2d(pts)
        out = np.empty(pts.shape[0])
        for i, q in enumerate(pts):
            q = np.asarray(q, dtype=np.float64)
            cell = self._locate(q)
            if cell is None:
                gap = np.maximum(np.maximum(self.root_lo - q, q - self.root_hi), 0.0)
                out[i] = float(np.linalg.norm(gap))
            else:
                out[i] = float(min((q - cell.lo).min(), (cell.hi - q).min()))
        return out
