"""CART decision trees (Gini impurity) and random forests."""

from __future__ import annotations

import numpy as np

from ..rng import derive_seed, rng_for

LEAF = -1


def _gini_cost(counts: np.ndarray) -> np.ndarray:
    """Weighted Gini ``W * (1 - sum p_c^2)`` for each row of class-weight sums."""
    tot = counts.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = np.where(tot > 0, (counts * counts).sum(axis=-1) / tot, 0.0)
    return tot - sq


class DecisionTree:
    """Binary CART classifier on axis-aligned thresholds.

    A sample goes left when ``x[feature] <= threshold``. Splits minimize the
    weighted Gini impurity of the children; ties go to the lower feature index
    and then the lower threshold. ``max_features`` limits the candidate
    features drawn per split (``None`` means all of them).
    """

    def __init__(self, max_depth=None, min_leaf: int = 1, max_features=None, seed: int = 0):
        self.max_depth = max_depth
        self.min_leaf = max(1, int(min_leaf))
        self.max_features = max_features
        self.seed = seed

    def _n_candidates(self, d: int) -> int:
        mf = self.max_features
        if mf is None:
            return d
        if mf == "sqrt":
            return max(1, int(np.sqrt(d)))
        if isinstance(mf, float) and 0 < mf <= 1:
            return max(1, int(mf * d))
        return max(1, min(d, int(mf)))

    def fit(self, X, y, n_classes: int, sample_weight=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        n, d = X.shape
        w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        self.n_classes = n_classes
        self.n_features = d
        rng = rng_for(self.seed, "tree-features")
        mtry = self._n_candidates(d)
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y] = w

        feature, threshold, left, right, leaf_class = [], [], [], [], []

        def new_node():
            for lst in (feature, threshold, left, right, leaf_class):
                lst.append(LEAF)
            return len(feature) - 1

        root = new_node()
        stack = [(root, np.arange(n), 0)]
        while stack:
            node, idx, depth = stack.pop()
            counts = onehot[idx].sum(axis=0)
            leaf_class[node] = int(np.argmax(counts))
            threshold[node] = 0.0
            if (self.max_depth is not None and depth >= self.max_depth) or idx.size < 2 * self.min_leaf:
                continue
            if np.count_nonzero(counts) <= 1:
                continue
            best = self._best_split(X, onehot, idx, mtry, rng)
            if best is None:
                continue
            f, thr = best
            mask = X[idx, f] <= thr
            feature[node], threshold[node] = f, thr
            li, ri = new_node(), new_node()
            left[node], right[node] = li, ri
            stack.append((ri, idx[~mask], depth + 1))
            stack.append((li, idx[mask], depth + 1))

        self.feature_ = np.array(feature, dtype=np.int64)
        self.threshold_ = np.array(threshold, dtype=float)
        self.left_ = np.array(left, dtype=np.int64)
        self.right_ = np.array(right, dtype=np.int64)
        self.leaf_class_ = np.array(leaf_class, dtype=np.int64)
        return self

    def _best_split(self, X, onehot, idx, mtry, rng):
        d = X.shape[1]
        if mtry < d:
            feats = np.sort(rng.choice(d, size=mtry, replace=False))
        else:
            feats = np.arange(d)
        m = idx.size
        W = onehot[idx]
        K = W.shape[1]
        sizes = np.arange(1, m)  # left-child size for a cut after each sorted position
        size_ok = ((sizes >= self.min_leaf) & (sizes <= m - self.min_leaf))[:, None]
        best_cost, best = np.inf, None
        chunk = max(1, 2_000_000 // max(1, m * K))
        for c0 in range(0, feats.size, chunk):
            fs = feats[c0:c0 + chunk]
            cols = X[np.ix_(idx, fs)]
            order = np.argsort(cols, axis=0, kind="stable")
            v = np.take_along_axis(cols, order, axis=0)
            cum = np.cumsum(W[order], axis=0)  # (m, F, K)
            lc = cum[:-1]
            cost = _gini_cost(lc) + _gini_cost(cum[-1][None, :, :] - lc)
            valid = (v[:-1] < v[1:]) & size_ok
            if not valid.any():
                continue
            cost = np.where(valid, cost, np.inf)
            # feature-major flattening keeps ties on the lower feature, then lower threshold
            flat = int(np.argmin(cost.T.ravel()))
            fj, pj = divmod(flat, m - 1)
            if cost[pj, fj] < best_cost:
                a, b = v[pj, fj], v[pj + 1, fj]
                thr = a + (b - a) / 2.0
                if not (a <= thr < b):
                    thr = a
                best_cost, best = float(cost[pj, fj]), (int(fs[fj]), float(thr))
        return best

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature_[node] != LEAF
        while active.any():
            r = rows[active]
            nd = node[r]
            go_left = X[r, self.feature_[nd]] <= self.threshold_[nd]
            node[r] = np.where(go_left, self.left_[nd], self.right_[nd])
            active = self.feature_[node] != LEAF
        return node

    def predict(self, X) -> np.ndarray:
        return self.leaf_class_[self.apply(X)]

    @property
    def depth(self) -> int:
        def walk(i):
            return 0 if self.feature_[i] == LEAF else 1 + max(walk(self.left_[i]), walk(self.right_[i]))

        return walk(0)

    # persistence: nested {feature, threshold, left, right} / {leaf_class}
    def to_dict(self) -> dict:
        def node(i):
            if self.feature_[i] == LEAF:
                return {"leaf_class": int(self.leaf_class_[i])}
            return {
                "feature": int(self.feature_[i]),
                "threshold": float(self.threshold_[i]),
                "left": node(self.left_[i]),
                "right": node(self.right_[i]),
            }

        return {"n_classes": self.n_classes, "n_features": self.n_features, "root": node(0)}

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTree":
        tree = cls()
        tree.n_classes = doc["n_classes"]
        tree.n_features = doc["n_features"]
        feature, threshold, left, right, leaf_class = [], [], [], [], []
        stack = [(doc["root"], None, None)]
        while stack:
            nd, parent, side = stack.pop()
            i = len(feature)
            if parent is not None:
                (left if side == "left" else right)[parent] = i
            if "leaf_class" in nd:
                feature.append(LEAF)
                threshold.append(0.0)
                leaf_class.append(nd["leaf_class"])
                left.append(LEAF)
                right.append(LEAF)
            else:
                feature.append(nd["feature"])
                threshold.append(nd["threshold"])
                leaf_class.append(LEAF)
                left.append(LEAF)
                right.append(LEAF)
                stack.append((nd["right"], i, "right"))
                stack.append((nd["left"], i, "left"))
        tree.feature_ = np.array(feature, dtype=np.int64)
        tree.threshold_ = np.array(threshold, dtype=float)
        tree.left_ = np.array(left, dtype=np.int64)
        tree.right_ = np.array(right, dtype=np.int64)
        tree.leaf_class_ = np.array(leaf_class, dtype=np.int64)
        return tree


def vote(predictions: np.ndarray, n_classes: int, weights=None) -> np.ndarray:
    """Column-wise (weighted) majority over stacked predictions; ties to the smallest id."""
    predictions = np.atleast_2d(predictions)
    w = np.ones(predictions.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    scores = np.zeros((predictions.shape[1], n_classes))
    cols = np.arange(predictions.shape[1])
    for row, wt in zip(predictions, w):
        scores[cols, row] += wt
    return np.argmax(scores, axis=1)


class RandomForest:
    """Bagged CART trees with random feature candidates per split."""

    def __init__(self, n_trees: int = 100, max_depth=None, min_leaf: int = 1, max_features="sqrt",
                 bootstrap: bool = True, seed: int = 0):
        self.n_trees = int(n_trees)
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X, y, n_classes: int):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        self.n_classes = n_classes
        self.trees_ = []
        for t in range(self.n_trees):
            tree_seed = derive_seed(self.seed, "tree", t)
            if self.bootstrap:
                idx = rng_for(tree_seed, "bootstrap").integers(0, n, size=n)
            else:
                idx = np.arange(n)
            tree = DecisionTree(self.max_depth, self.min_leaf, self.max_features, seed=tree_seed)
            self.trees_.append(tree.fit(X[idx], y[idx], n_classes))
        return self

    def predict(self, X) -> np.ndarray:
        return vote(np.vstack([t.predict(X) for t in self.trees_]), self.n_classes)

    def to_dict(self) -> dict:
        return {"n_classes": self.n_classes, "trees": [t.to_dict() for t in self.trees_]}

    @classmethod
    def from_dict(cls, doc: dict) -> "RandomForest":
        rf = cls(n_trees=len(doc["trees"]))
        rf.n_classes = doc["n_classes"]
        rf.trees_ = [DecisionTree.from_dict(t) for t in doc["trees"]]
        return rf
