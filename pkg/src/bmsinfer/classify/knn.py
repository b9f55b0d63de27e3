"""k-nearest-neighbour classifier."""

from __future__ import annotations

import numpy as np


class KNN:
    def __init__(self, k: int = 5):
        self.k = int(k)

    def fit(self, X, y, n_classes: int):
        self.X_ = np.asarray(X, dtype=float)
        self.y_ = np.asarray(y, dtype=np.int64)
        self.n_classes = n_classes
        return self

    def predict(self, X) -> np.ndarray:
        """Majority label of the k nearest training points.

        Equidistant neighbours are ranked by training order; vote ties go to
        the smallest label id.
        """
        X = np.asarray(X, dtype=float)
        n_train, d = self.X_.shape
        k = min(self.k, n_train)
        # exact differences so a query identical to a training point is at distance 0
        batch = max(1, 4_000_000 // max(1, n_train * d))
        out = np.empty(X.shape[0], dtype=np.int64)
        for start in range(0, X.shape[0], batch):
            Q = X[start:start + batch]
            diff = Q[:, None, :] - self.X_[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            nn = np.argsort(d2, axis=1, kind="stable")[:, :k]
            labels = self.y_[nn]
            counts = np.zeros((Q.shape[0], self.n_classes), dtype=np.int64)
            for j in range(k):
                counts[np.arange(Q.shape[0]), labels[:, j]] += 1
            out[start:start + batch] = np.argmax(counts, axis=1)
        return out

    def to_dict(self) -> dict:
        return {"n_classes": self.n_classes, "k": self.k, "X": self.X_.tolist(), "y": self.y_.tolist()}

    @classmethod
    def from_dict(cls, doc: dict):
        return cls(doc["k"]).fit(np.array(doc["X"], dtype=float), np.array(doc["y"]), doc["n_classes"])
