"""CART regression trees and a bagged random forest.

Trees are stored flat (sklearn style): parallel arrays ``feature``,
``threshold``, ``left``, ``right``, ``value`` indexed by node id, with
``feature == -1`` marking a leaf. A forest concatenates its trees and keeps
per-tree offsets. The growing and prediction loops are compiled with numba;
everything else is plain numpy.

Conventions fixed for reproducibility:

* a sample goes left iff ``x[feature] < threshold`` (equality goes right);
* candidate thresholds are midpoints of consecutive distinct sorted values;
* among splits whose variance reductions agree to a relative ``1e-9``, the
  lowest feature index wins, then the smallest threshold;
* rows are put into a canonical (lexicographic) order before fitting, so the
  fitted model does not depend on the order of the training rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DimensionMismatch, EmptyTrainingSet

TIE_RTOL = 1e-9
# reductions below this fraction of the node variance count as zero
MIN_GAIN_RTOL = 1e-12


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    max_features: float = 1.0
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if not 0.0 < self.max_features <= 1.0:
            raise ValueError("max_features must lie in (0, 1]")

    def n_candidates(self, n_features: int) -> int:
        return max(1, int(np.ceil(self.max_features * n_features)))


PROFILES = {
    "full": ForestParams(n_trees=100),
    "desk": ForestParams(n_trees=25),
}


# ---------------------------------------------------------------------------
# compiled kernels
# ---------------------------------------------------------------------------


@numba.njit(cache=True, error_model="numpy")
def _node_split(XS, YS, lo, hi, cand, min_leaf, node_var):
    """Scan the presorted lists ``XS[f, lo:hi]`` / ``YS[f, lo:hi]`` for the best split."""
    n = hi - lo
    total = 0.0
    for i in range(lo, hi):
        total += YS[0, i]
    best_f = -1
    best_thr = 0.0
    best_red = -1.0
    for f in cand:
        s_left = 0.0
        for i in range(lo, hi - 1):
            s_left += YS[f, i]
            a = XS[f, i]
            b = XS[f, i + 1]
            if a == b:
                continue
            n_l = i + 1 - lo
            n_r = n - n_l
            if n_l < min_leaf or n_r < min_leaf:
                continue
            diff = s_left / n_l - (total - s_left) / n_r
            red = n_l * n_r * diff * diff / (n * n)
            if red <= MIN_GAIN_RTOL * node_var:
                continue
            if best_f < 0 or red > best_red + TIE_RTOL * best_red:
                thr = 0.5 * (a + b)
                if thr <= a:
                    thr = b
                best_f = f
                best_thr = thr
                best_red = red
    return best_f, best_thr, best_red


@numba.njit(cache=True, error_model="numpy")
def _sorted_lists(X, y, gorder, counts):
    """Per-feature sample lists in feature order, each row repeated ``counts[row]`` times.

    Returns row ids ``S`` with the matching feature values ``XS`` and targets ``YS``.
    """
    p = gorder.shape[0]
    n = 0
    for c in counts:
        n += c
    S = np.empty((p, n), dtype=np.int64)
    XS = np.empty((p, n))
    YS = np.empty((p, n))
    for f in range(p):
        pos = 0
        for r in gorder[f]:
            for _ in range(counts[r]):
                S[f, pos] = r
                XS[f, pos] = X[r, f]
                YS[f, pos] = y[r]
                pos += 1
    return S, XS, YS


@numba.njit(cache=True, error_model="numpy")
def _grow(X, S, XS, YS, max_depth, min_split, min_leaf, n_cand,
          feature, threshold, left, right, value, start):
    """Grow one tree over the sample lists ``S`` into the arrays at ``start``.

    Returns the number of nodes written. Child pointers are tree-local.
    """
    p = X.shape[1]
    m = S.shape[1]
    goes_left = np.zeros(X.shape[0], dtype=np.bool_)
    buf = np.empty(m, dtype=np.int64)
    xbuf = np.empty(m)
    ybuf = np.empty(m)
    st_node = np.empty(m * 2, dtype=np.int64)
    st_lo = np.empty(m * 2, dtype=np.int64)
    st_hi = np.empty(m * 2, dtype=np.int64)
    st_depth = np.empty(m * 2, dtype=np.int64)
    all_feats = np.arange(p)

    n_nodes = 1
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = m
    st_depth[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = st_node[top]
        lo = st_lo[top]
        hi = st_hi[top]
        depth = st_depth[top]
        n = hi - lo

        s = 0.0
        y_min = np.inf
        y_max = -np.inf
        for i in range(lo, hi):
            v = YS[0, i]
            s += v
            if v < y_min:
                y_min = v
            if v > y_max:
                y_max = v
        mean = s / n
        if mean < y_min:
            mean = y_min
        elif mean > y_max:
            mean = y_max

        k = start + node
        feature[k] = -1
        threshold[k] = 0.0
        left[k] = -1
        right[k] = -1
        value[k] = mean

        if n < min_split or (max_depth >= 0 and depth >= max_depth) or y_min == y_max:
            continue

        var = 0.0
        for i in range(lo, hi):
            d = YS[0, i] - mean
            var += d * d
        var /= n

        if n_cand < p:
            keys = np.random.random(p)
            cand = np.sort(np.argsort(keys)[:n_cand])
        else:
            cand = all_feats
        f, thr, red = _node_split(XS, YS, lo, hi, cand, min_leaf, var)
        if f < 0:
            continue

        n_l = 0
        for i in range(lo, hi):
            r = S[f, i]
            goes_left[r] = X[r, f] < thr
            if goes_left[r]:
                n_l += 1
        # stable partition of every feature list keeps each side sorted
        for g in range(p):
            a = 0
            b = n_l
            for i in range(lo, hi):
                r = S[g, i]
                if goes_left[r]:
                    j = a
                    a += 1
                else:
                    j = b
                    b += 1
                buf[j] = r
                xbuf[j] = XS[g, i]
                ybuf[j] = YS[g, i]
            for i in range(n):
                S[g, lo + i] = buf[i]
                XS[g, lo + i] = xbuf[i]
                YS[g, lo + i] = ybuf[i]

        feature[k] = f
        threshold[k] = thr
        l_id = n_nodes
        r_id = n_nodes + 1
        n_nodes += 2
        left[k] = l_id
        right[k] = r_id
        # push right first so the left subtree is numbered first
        st_node[top] = r_id
        st_lo[top] = lo + n_l
        st_hi[top] = hi
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = l_id
        st_lo[top] = lo
        st_hi[top] = lo + n_l
        st_depth[top] = depth + 1
        top += 1
    return n_nodes


@numba.njit(cache=True, error_model="numpy")
def _grow_many(X, y, gorder, tree_seeds, bootstrap, max_depth, min_split, min_leaf, n_cand):
    m = X.shape[0]
    n_trees = tree_seeds.shape[0]
    cap = 2 * m - 1
    feature = np.empty(n_trees * cap, dtype=np.int64)
    threshold = np.empty(n_trees * cap)
    left = np.empty(n_trees * cap, dtype=np.int64)
    right = np.empty(n_trees * cap, dtype=np.int64)
    value = np.empty(n_trees * cap)
    offsets = np.zeros(n_trees + 1, dtype=np.int64)
    counts = np.ones(m, dtype=np.int64)
    pos = 0
    for t in range(n_trees):
        np.random.seed(tree_seeds[t])
        if bootstrap:
            counts[:] = 0
            for _ in range(m):
                counts[np.random.randint(0, m)] += 1
        S, XS, YS = _sorted_lists(X, y, gorder, counts)
        used = _grow(X, S, XS, YS, max_depth, min_split, min_leaf, n_cand,
                     feature, threshold, left, right, value, pos)
        pos += used
        offsets[t + 1] = pos
    return feature[:pos], threshold[:pos], left[:pos], right[:pos], value[:pos], offsets


@numba.njit(cache=True, error_model="numpy")
def _predict(feature, threshold, left, right, value, offsets, X):
    n_trees = offsets.shape[0] - 1
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        acc = 0.0
        for t in range(n_trees):
            base = offsets[t]
            node = 0
            while feature[base + node] >= 0:
                if X[r, feature[base + node]] < threshold[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
            acc += value[base + node]
        out[r] = acc / n_trees
    return out


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tree:
    """A single fitted tree (a view into flat node arrays)."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def depth(self) -> int:
        def d(node):
            if self.feature[node] < 0:
                return 0
            return 1 + max(d(self.left[node]), d(self.right[node]))
        return d(0)

    def as_nested(self, node: int = 0):
        """Nested tuples: ``("leaf", value)`` or ``("split", f, thr, left, right)``."""
        if self.feature[node] < 0:
            return ("leaf", float(self.value[node]))
        return (
            "split",
            int(self.feature[node]),
            float(self.threshold[node]),
            self.as_nested(int(self.left[node])),
            self.as_nested(int(self.right[node])),
        )


@dataclass(frozen=True, eq=False)
class Forest:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    offsets: np.ndarray
    n_features: int
    target_range: tuple[float, float]
    params: ForestParams = field(default_factory=ForestParams)

    @property
    def n_trees(self) -> int:
        return self.offsets.shape[0] - 1

    def tree(self, t: int) -> Tree:
        a, b = self.offsets[t], self.offsets[t + 1]
        return Tree(self.feature[a:b], self.threshold[a:b], self.left[a:b],
                    self.right[a:b], self.value[a:b], self.n_features)

    @property
    def trees(self) -> list[Tree]:
        return [self.tree(t) for t in range(self.n_trees)]

    def predict(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        out = _predict(self.feature, self.threshold, self.left, self.right,
                       self.value, self.offsets, X)
        return np.clip(out, *self.target_range)


def _prepare(features, targets):
    X = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float).ravel()
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0 or y.shape[0] == 0:
        raise EmptyTrainingSet("cannot fit on zero rows")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} feature rows but {y.shape[0]} targets")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("training data must be finite")
    # canonical row order: by feature 0, then 1, ..., then target
    order = np.lexsort(np.vstack([y[None, :], X.T[::-1]]))
    return np.ascontiguousarray(X[order]), np.ascontiguousarray(y[order])


def _feature_order(X):
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T.astype(np.int64))


def _tree_seeds(seed: int, n_trees: int) -> np.ndarray:
    ss = np.random.SeedSequence(int(seed))
    return ss.generate_state(n_trees, dtype=np.uint32).astype(np.int64)


def _fit(X, y, params: ForestParams, seeds, bootstrap) -> Forest:
    max_depth = -1 if params.max_depth is None else int(params.max_depth)
    gorder = _feature_order(X)
    arrays = _grow_many(X, y, gorder, seeds, bootstrap, max_depth, int(params.min_samples_split),
                        int(params.min_samples_leaf), params.n_candidates(X.shape[1]))
    return Forest(*arrays, n_features=X.shape[1],
                  target_range=(float(y.min()), float(y.max())), params=params)


def fit_forest(features, targets, params: ForestParams = ForestParams()) -> Forest:
    """Bagged CART ensemble; tree ``t`` is seeded from ``(params.seed, t)``."""
    X, y = _prepare(features, targets)
    return _fit(X, y, params, _tree_seeds(params.seed, params.n_trees), params.bootstrap)


def fit_tree(features, targets, params: ForestParams = ForestParams(), rng_stream: int = 0) -> Tree:
    """Grow one tree on all rows (no bootstrap).

    ``rng_stream`` seeds feature subsampling and is unused when
    ``params.max_features == 1``.
    """
    X, y = _prepare(features, targets)
    seeds = np.array([int(rng_stream) & 0xFFFFFFFF], dtype=np.int64)
    return _fit(X, y, params, seeds, False).tree(0)


def best_split(features, targets, candidate_features=None, min_samples_leaf: int = 1):
    """Best variance-reduction split at a single node, or ``None``.

    Returns ``(feature_index, threshold, variance_reduction)`` where the
    reduction is ``Var(y) - m_L/m Var(y_L) - m_R/m Var(y_R)``.
    """
    X, y = _prepare(features, targets)
    if X.shape[0] < 2:
        return None
    if candidate_features is None:
        candidate_features = range(X.shape[1])
    cand = np.array(sorted(set(int(c) for c in candidate_features)), dtype=np.int64)
    if cand.size == 0:
        raise ValueError("candidate_features must be non-empty")
    if y.min() == y.max():
        return None
    _, XS, YS = _sorted_lists(X, y, _feature_order(X), np.ones(X.shape[0], dtype=np.int64))
    f, thr, red = _node_split(XS, YS, 0, X.shape[0], cand, int(min_samples_leaf), float(y.var()))
    if f < 0:
        return None
    return int(f), float(thr), float(red)


def predict_tree(tree: Tree, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != tree.n_features:
        raise DimensionMismatch(f"expected {tree.n_features} features, got {x.shape[0]}")
    node = 0
    while tree.feature[node] >= 0:
        node = tree.left[node] if x[tree.feature[node]] < tree.threshold[node] else tree.right[node]
    return float(tree.value[node])


def predict_forest(forest: Forest, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(forest.predict(x[None, :])[0])
