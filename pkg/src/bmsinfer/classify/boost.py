"""Multi-class AdaBoost (SAMME) over shallow CART trees."""

from __future__ import annotations

import logging

import numpy as np

from ..rng import derive_seed
from .tree import DecisionTree, vote

log = logging.getLogger(__name__)

_ERR_FLOOR = 1e-10


class AdaBoostSAMME:
    """SAMME boosting.

    Each round fits a depth-limited tree to the current sample weights and
    gives it weight ``ln((1 - err) / err) + ln(K - 1)``. Boosting stops as soon
    as a learner is no better than chance (``err >= 1 - 1/K``) or fits the
    weighted data perfectly.
    """

    def __init__(self, n_rounds: int = 100, stump_depth: int = 1, seed: int = 0):
        self.n_rounds = int(n_rounds)
        self.stump_depth = int(stump_depth)
        self.seed = seed

    def fit(self, X, y, n_classes: int):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        K = n_classes
        w = np.full(n, 1.0 / n)
        self.n_classes = K
        self.learners_, self.alphas_, self.errors_ = [], [], []
        for r in range(self.n_rounds):
            tree = DecisionTree(max_depth=self.stump_depth, seed=derive_seed(self.seed, "round", r))
            tree.fit(X, y, K, sample_weight=w)
            miss = tree.predict(X) != y
            err = float(w[miss].sum() / w.sum())
            if err >= 1.0 - 1.0 / K:
                if not self.learners_:
                    # keep one learner so the model can still predict
                    self.learners_.append(tree)
                    self.alphas_.append(1.0)
                    self.errors_.append(err)
                log.debug("SAMME stopped at round %d, err %.4f", r, err)
                break
            alpha = np.log((1.0 - err) / max(err, _ERR_FLOOR)) + np.log(K - 1.0)
            self.learners_.append(tree)
            self.alphas_.append(float(alpha))
            self.errors_.append(err)
            if err <= 0.0:
                break
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        return self

    def predict(self, X) -> np.ndarray:
        preds = np.vstack([t.predict(X) for t in self.learners_])
        return vote(preds, self.n_classes, self.alphas_)

    def to_dict(self) -> dict:
        return {
            "n_classes": self.n_classes,
            "alphas": list(self.alphas_),
            "errors": list(self.errors_),
            "learners": [t.to_dict() for t in self.learners_],
        }

    @classmethod
    def from_dict(cls, doc: dict):
        obj = cls(n_rounds=len(doc["learners"]))
        obj.n_classes = doc["n_classes"]
        obj.alphas_ = list(doc["alphas"])
        obj.errors_ = list(doc.get("errors", []))
        obj.learners_ = [DecisionTree.from_dict(t) for t in doc["learners"]]
        return obj
