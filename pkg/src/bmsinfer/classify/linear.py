"""Multinomial logistic regression and one-vs-rest linear SVM, both full-batch."""

from __future__ import annotations

import numpy as np


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def softmax_loss_grad(W, b, X, Y, l2: float):
    """Mean cross-entropy plus ``l2/2 * ||W||^2`` and its gradient.

    ``Y`` is one-hot ``(m, K)``. Returns ``(loss, dW, db)``.
    """
    m = X.shape[0]
    Z = X @ W + b
    Zs = Z - Z.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(Zs).sum(axis=1))
    loss = float(np.mean(logsum - (Zs * Y).sum(axis=1)) + 0.5 * l2 * np.sum(W * W))
    G = (softmax(Z) - Y) / m
    return loss, X.T @ G + l2 * W, G.sum(axis=0)


class LogisticRegression:
    def __init__(self, rate: float = 0.1, epochs: int = 500, l2: float = 1e-3):
        self.rate = rate
        self.epochs = int(epochs)
        self.l2 = l2

    def fit(self, X, y, n_classes: int):
        X = np.asarray(X, dtype=float)
        m, d = X.shape
        Y = np.zeros((m, n_classes))
        Y[np.arange(m), y] = 1.0
        W = np.zeros((d, n_classes))
        b = np.zeros(n_classes)
        self.loss_history_ = []
        for _ in range(self.epochs):
            loss, dW, db = softmax_loss_grad(W, b, X, Y, self.l2)
            self.loss_history_.append(loss)
            W -= self.rate * dW
            b -= self.rate * db
        self.loss_history_.append(softmax_loss_grad(W, b, X, Y, self.l2)[0])
        self.W_, self.b_ = W, b
        self.n_classes = n_classes
        return self

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.W_ + self.b_

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)

    def to_dict(self) -> dict:
        return {"n_classes": self.n_classes, "weights": self.W_.tolist(), "bias": self.b_.tolist()}

    @classmethod
    def from_dict(cls, doc: dict):
        obj = cls()
        obj.n_classes = doc["n_classes"]
        obj.W_ = np.array(doc["weights"], dtype=float).reshape(-1, obj.n_classes)
        obj.b_ = np.array(doc["bias"], dtype=float)
        return obj


class LinearSVM(LogisticRegression):
    """One-vs-rest hinge loss with L2, subgradient steps of size ``rate / sqrt(t + 1)``."""

    def fit(self, X, y, n_classes: int):
        X = np.asarray(X, dtype=float)
        m, d = X.shape
        S = -np.ones((m, n_classes))
        S[np.arange(m), y] = 1.0
        W = np.zeros((d, n_classes))
        b = np.zeros(n_classes)
        for t in range(self.epochs):
            margin = S * (X @ W + b)
            active = (margin < 1.0) * S
            gW = self.l2 * W - X.T @ active / m
            gb = -active.sum(axis=0) / m
            step = self.rate / np.sqrt(t + 1.0)
            W -= step * gW
            b -= step * gb
        self.W_, self.b_ = W, b
        self.n_classes = n_classes
        return self

    def objective(self, X, y) -> np.ndarray:
        """Per-class regularized hinge objective at the fitted weights."""
        X = np.asarray(X, dtype=float)
        S = -np.ones((X.shape[0], self.n_classes))
        S[np.arange(X.shape[0]), y] = 1.0
        hinge = np.maximum(0.0, 1.0 - S * self.decision_function(X)).mean(axis=0)
        return 0.5 * self.l2 * (self.W_ ** 2).sum(axis=0) + hinge
