"""Class balancing, stratified splits, cross-validation and grid search."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from ..errors import ClassTooSmall, EmptyGrid
from ..metrics import evaluate
from ..parallel import pmap
from ..rng import derive_seed, rng_for
from .base import Dataset, ModelSpec, predict, train


def balance_downsample(data: Dataset, seed: int = 0) -> Dataset:
    """Downsample every present class to the smallest class count, then shuffle."""
    counts = data.class_counts()
    present = np.flatnonzero(counts)
    target = int(counts[present].min())
    keep = []
    for c in present:
        idx = np.flatnonzero(data.y == c)
        keep.append(rng_for(seed, "balance", int(c)).choice(idx, size=target, replace=False))
    order = rng_for(seed, "balance-shuffle").permutation(np.concatenate(keep))
    return data.subset(order)


def _half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_indices(y, train_fraction: float, seed: int = 0, stratified: bool = True):
    """Seeded train/test index arrays (each sorted ascending)."""
    y = np.asarray(y, dtype=np.int64)
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    groups = [np.flatnonzero(y == c) for c in np.unique(y)] if stratified else [np.arange(y.size)]
    train, test = [], []
    for g, idx in enumerate(groups):
        if idx.size < 2:
            raise ClassTooSmall(f"class with {idx.size} instance(s) cannot be split")
        n_tr = min(max(_half_up(train_fraction * idx.size), 1), idx.size - 1)
        perm = rng_for(seed, "split", g).permutation(idx)
        train.append(perm[:n_tr])
        test.append(perm[n_tr:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split(data: Dataset, train_fraction: float, seed: int = 0, stratified: bool = True):
    tr, te = split_indices(data.y, train_fraction, seed, stratified)
    return data.subset(tr), data.subset(te)


def stratified_folds(y, folds: int = 5, seed: int = 0) -> np.ndarray:
    """Fold id per instance.

    Instances are ordered class by class (shuffled within each class) and dealt
    round-robin, so every class is spread evenly and fold sizes differ by at
    most one.
    """
    y = np.asarray(y, dtype=np.int64)
    counts = np.bincount(y)
    present = np.flatnonzero(counts)
    if counts[present].min() < folds:
        raise ClassTooSmall(f"every class needs at least {folds} instances for {folds}-fold CV")
    order = np.concatenate([rng_for(seed, "folds", int(c)).permutation(np.flatnonzero(y == c)) for c in present])
    fold = np.empty(y.size, dtype=np.int64)
    fold[order] = np.arange(y.size) % folds
    return fold


@dataclass
class CVResult:
    accuracy: list[float]
    macro_f: list[float]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracy))

    @property
    def mean_macro_f(self) -> float:
        return float(np.mean(self.macro_f))


def cross_validate(spec: ModelSpec, data: Dataset, folds: int = 5, seed: int = 0) -> CVResult:
    fold = stratified_folds(data.y, folds, seed)
    acc, mf = [], []
    for f in range(folds):
        tr = np.flatnonzero(fold != f)
        te = np.flatnonzero(fold == f)
        model = train(spec, data.subset(tr))
        rep = evaluate(data.y[te], predict(model, data.X[te]), data.n_classes)
        acc.append(rep.accuracy)
        mf.append(rep.macro_f)
    return CVResult(acc, mf)


def expand_grid(grid) -> list[dict]:
    """``{name: [values]}`` to a list of parameter dicts (last key varies fastest)."""
    if isinstance(grid, dict):
        keys = list(grid)
        return [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]
    return [dict(p) for p in grid]


@dataclass
class GridSearchResult:
    best: ModelSpec
    scores: list[tuple[dict, float]]


def _score_cell(params, algorithm, data, folds, seed):
    spec = ModelSpec(algorithm, params, derive_seed(seed, "model"))
    return cross_validate(spec, data, folds, seed).mean_accuracy


def grid_search(algorithm: str, grid, data: Dataset, folds: int = 5, seed: int = 0, jobs: int = 1) -> GridSearchResult:
    """Exhaustive search by mean CV accuracy; ties keep the earlier grid point."""
    cells = expand_grid(grid)
    if not cells:
        raise EmptyGrid(f"{algorithm}: empty hyper-parameter grid")
    scores = pmap(partial(_score_cell, algorithm=algorithm, data=data, folds=folds, seed=seed), cells, jobs)
    best = 0
    for i, s in enumerate(scores):
        if s > scores[best]:
            best = i
    return GridSearchResult(ModelSpec(algorithm, cells[best], derive_seed(seed, "model")), list(zip(cells, scores)))
