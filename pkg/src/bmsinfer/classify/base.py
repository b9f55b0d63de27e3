"""Uniform train/predict contract over the six learners."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import BadSpec, DimensionMismatch, EmptyData, SingleClass
from ..rng import derive_seed
from .boost import AdaBoostSAMME
from .knn import KNN
from .linear import LinearSVM, LogisticRegression
from .tree import DecisionTree, RandomForest

FORMAT_VERSION = 1

DEFAULT_PARAMS = {
    "lr": {"rate": 0.1, "epochs": 500, "l2": 1e-3},
    "knn": {"k": 5},
    "dt": {"max_depth": None, "min_leaf": 1},
    "rf": {"n_trees": 100, "max_depth": None, "min_leaf": 1, "max_features": "sqrt", "bootstrap": True},
    "adaboost": {"n_rounds": 100, "stump_depth": 1},
    "svm": {"rate": 0.1, "epochs": 500, "l2": 1e-3},
}

DEFAULT_GRIDS = {
    "knn": {"k": [1, 3, 5, 7, 11]},
    "dt": {"max_depth": [3, 5, 8, 12, None]},
    "rf": {"n_trees": [50, 100, 200]},
    "adaboost": {"n_rounds": [50, 100, 200], "stump_depth": [1, 2]},
    "lr": {"l2": [1e-4, 1e-3, 1e-2, 1e-1], "rate": [0.01, 0.1], "epochs": [500]},
    "svm": {"l2": [1e-4, 1e-3, 1e-2, 1e-1], "rate": [0.01, 0.1], "epochs": [500]},
}

ALGORITHMS = tuple(DEFAULT_PARAMS)

_CLASSES = {
    "lr": LogisticRegression,
    "knn": KNN,
    "dt": DecisionTree,
    "rf": RandomForest,
    "adaboost": AdaBoostSAMME,
    "svm": LinearSVM,
}

_SEEDED = {"dt", "rf", "adaboost"}


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    n_classes: int
    label_names: list[str] | None = None
    family: str = ""
    ids: list[str] | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise DimensionMismatch(f"X {self.X.shape} and y {self.y.shape} do not align")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= self.n_classes):
            raise ValueError(f"labels must lie in [0, {self.n_classes})")

    def __len__(self) -> int:
        return self.y.shape[0]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        ids = None if self.ids is None else [self.ids[i] for i in idx]
        return Dataset(self.X[idx], self.y[idx], self.n_classes, self.label_names, self.family, ids)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)


@dataclass(frozen=True)
class ModelSpec:
    algorithm: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def resolved(self) -> dict:
        if self.algorithm not in DEFAULT_PARAMS:
            raise BadSpec(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.algorithm])
        if unknown:
            raise BadSpec(f"{self.algorithm}: unknown hyper-parameters {sorted(unknown)}")
        return {**DEFAULT_PARAMS[self.algorithm], **self.params}


@dataclass
class Standardizer:
    """Per-feature z-scoring; zero-variance features pass through unchanged."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        sd = X.std(axis=0)
        live = sd > 0
        return cls(np.where(live, X.mean(axis=0), 0.0), np.where(live, sd, 1.0))

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale


@dataclass
class TrainedModel:
    algorithm: str
    params: dict
    seed: int
    n_features: int
    n_classes: int
    standardizer: Standardizer
    estimator: object


def _build(algorithm: str, params: dict, seed: int):
    cls = _CLASSES[algorithm]
    if algorithm in _SEEDED:
        return cls(**params, seed=derive_seed(seed, algorithm))
    return cls(**params)


def train(spec: ModelSpec, data: Dataset) -> TrainedModel:
    """Standardize with training statistics, then fit the requested learner."""
    params = spec.resolved()
    if len(data) == 0:
        raise EmptyData("cannot train on an empty dataset")
    if data.n_classes < 2 or np.unique(data.y).size < 2:
        raise SingleClass("training data must contain at least two classes")
    scaler = Standardizer.fit(data.X)
    est = _build(spec.algorithm, params, spec.seed)
    est.fit(scaler.transform(data.X), data.y, data.n_classes)
    return TrainedModel(spec.algorithm, params, spec.seed, data.X.shape[1], data.n_classes, scaler, est)


def predict(model: TrainedModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got shape {X.shape}")
    return model.estimator.predict(model.standardizer.transform(X)).astype(np.int64)


def model_to_dict(model: TrainedModel, label_names=None) -> dict:
    return {
        "format": "bmsinfer-model",
        "version": FORMAT_VERSION,
        "algorithm": model.algorithm,
        "params": model.params,
        "seed": model.seed,
        "n_features": model.n_features,
        "n_classes": model.n_classes,
        "label_names": list(label_names) if label_names is not None else None,
        "standardization": {"mean": model.standardizer.mean.tolist(), "std": model.standardizer.scale.tolist()},
        "model": model.estimator.to_dict(),
    }


def model_from_dict(doc: dict) -> TrainedModel:
    if doc.get("format") != "bmsinfer-model" or doc.get("version") != FORMAT_VERSION:
        raise BadSpec("not a version-1 bmsinfer model document")
    algo = doc["algorithm"]
    est = _CLASSES[algo].from_dict(doc["model"])
    scaler = Standardizer(np.array(doc["standardization"]["mean"], dtype=float),
                          np.array(doc["standardization"]["std"], dtype=float))
    return TrainedModel(algo, doc["params"], doc["seed"], doc["n_features"], doc["n_classes"], scaler, est)


def save_model(model: TrainedModel, label_names=None) -> str:
    return json.dumps(model_to_dict(model, label_names), indent=1, allow_nan=False) + "\n"


def load_model(text: str) -> TrainedModel:
    return model_from_dict(json.loads(text))
