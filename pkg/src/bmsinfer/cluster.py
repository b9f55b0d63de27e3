"""k-means, k-medoids and normalized spectral clustering."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import BadK
from .linalg import jacobi_eigen
from .rng import derive_seed, rng_for


@dataclass
class ClusterAssignment:
    assignments: np.ndarray
    k: int
    objective: float
    iterations: int
    seed: int
    history: list[float] = field(default_factory=list)
    centers: np.ndarray | None = None
    medoids: np.ndarray | None = None
    embedding: np.ndarray | None = None

    def to_csv(self, instance_ids=None) -> str:
        ids = range(len(self.assignments)) if instance_ids is None else instance_ids
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["instance_id", "cluster_id"])
        for iid, c in zip(ids, self.assignments):
            w.writerow([iid, int(c)])
        return buf.getvalue()


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise BadK(f"k={k} must lie in [1, {n}]")


def _sq_dists(X, C) -> np.ndarray:
    acc = np.zeros((X.shape[0], C.shape[0]))
    for j in range(X.shape[1]):
        diff = X[:, j][:, None] - C[:, j][None, :]
        acc += diff * diff
    return acc


def pairwise_distances(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.sqrt(_sq_dists(X, X))


def _kmeans_pp(X, k, rng) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _sq_dists(X, X[chosen]).ravel()
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        d2 = np.minimum(d2, _sq_dists(X, X[[nxt]]).ravel())
    return X[chosen].copy()


def kmeans(X, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-6) -> ClusterAssignment:
    """Lloyd's algorithm from a k-means++ start.

    ``history[t]`` is the within-cluster sum of squares after the t-th
    assign/update step; it never increases. An empty cluster is re-seeded at
    the point farthest from its current centroid.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    _check_k(n, k)
    centers = _kmeans_pp(X, k, rng_for(seed, "kmeans++"))
    history = []
    labels = np.zeros(n, dtype=np.int64)
    it = 0
    for it in range(1, max_iter + 1):
        d2 = _sq_dists(X, centers)
        labels = np.argmin(d2, axis=1)
        new = centers.copy()
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts):
            new[j] = X[labels == j].mean(axis=0)
        own = _sq_dists(X, new)[np.arange(n), labels]
        history.append(float(own.sum()))
        taken = set()
        for j in np.flatnonzero(counts == 0):
            far = own.copy()
            far[list(taken)] = -1.0
            p = int(np.argmax(far))
            taken.add(p)
            new[j] = X[p]
        shift = float(np.sqrt(((new - centers) ** 2).sum(axis=1)).max())
        centers = new
        if shift < tol:
            break
    return ClusterAssignment(labels, k, history[-1], it, seed, history, centers=centers)


def _assign_medoids(D, medoids):
    sub = D[:, medoids]
    slot = np.argmin(sub, axis=1)
    return slot, float(sub[np.arange(D.shape[0]), slot].sum())


def _build_init(D, k, rng, sample_size):
    n = D.shape[0]
    cand = np.sort(rng.choice(n, size=min(n, sample_size), replace=False))
    row_tot = D.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(row_tot[:, None] > 0, D / row_tot[:, None], 0.0)
    score = ratio[:, cand].sum(axis=0)
    medoids = [int(cand[np.argmin(score)])]
    nearest = D[:, medoids[0]].copy()
    for _ in range(1, k):
        free = np.array([c for c in cand if c not in medoids])
        costs = np.minimum(nearest[:, None], D[:, free]).sum(axis=0)
        pick = int(free[np.argmin(costs)])
        medoids.append(pick)
        nearest = np.minimum(nearest, D[:, pick])
    return np.array(medoids, dtype=np.int64)


def _refine_medoids(D, medoids, max_iter):
    """Alternate assign/update, then best-improvement swaps until no swap helps."""
    n, k = D.shape[0], len(medoids)
    slot, obj = _assign_medoids(D, medoids)
    history = [obj]
    it = 0
    while it < max_iter:
        it += 1
        new = medoids.copy()
        for s in range(k):
            members = np.flatnonzero(slot == s)
            if members.size == 0:
                continue
            within = D[np.ix_(members, members)].sum(axis=1)
            new[s] = members[int(np.argmin(within))]
        if np.array_equal(new, medoids):
            break
        medoids = new
        slot, obj = _assign_medoids(D, medoids)
        history.append(obj)

    scale = max(obj, 1.0)
    while it < max_iter:
        best = (obj, -1, -1)
        sub = D[:, medoids]
        for s in range(k):
            others = np.delete(sub, s, axis=1).min(axis=1) if k > 1 else np.full(n, np.inf)
            costs = np.minimum(others[:, None], D).sum(axis=0)
            costs[medoids] = np.inf
            h = int(np.argmin(costs))
            if costs[h] < best[0]:
                best = (float(costs[h]), s, h)
        if best[1] < 0 or best[0] >= obj - 1e-12 * scale:
            break
        it += 1
        medoids = medoids.copy()
        medoids[best[1]] = best[2]
        slot, obj = _assign_medoids(D, medoids)
        history.append(obj)
    return medoids, slot, obj, it, history


def _weighted_start(D, k, rng):
    n = D.shape[0]
    chosen = [int(rng.integers(n))]
    near = D[:, chosen[0]].copy()
    for _ in range(1, k):
        w = near * near
        total = w.sum()
        pick = int(rng.choice(n, p=w / total)) if total > 0 else int(
            rng.choice(np.setdiff1d(np.arange(n), chosen)))
        chosen.append(pick)
        near = np.minimum(near, D[:, pick])
    return np.array(chosen, dtype=np.int64)


def kmedoids(X, k: int, seed: int = 0, max_iter: int = 100, sample_size: int | None = None,
             n_init: int = 10) -> ClusterAssignment:
    """k-medoids on Euclidean distances.

    The first start is the most central point of a seeded candidate sample
    (Park-Jun normalized-distance score) followed by greedy additions that
    minimize the summed distance; further ``n_init - 1`` starts are drawn
    k-means++ style. Each start alternates assignment and in-cluster medoid
    updates, then applies best-improvement medoid swaps; the lowest objective
    wins (earliest start on ties). ``history`` belongs to the winning start,
    is non-increasing, and medoids are always data points.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    _check_k(n, k)
    D = pairwise_distances(X)
    size = sample_size if sample_size is not None else max(50, 10 * k)
    starts = [_build_init(D, k, rng_for(seed, "kmedoids"), size)]
    starts += [_weighted_start(D, k, rng_for(seed, "kmedoids", r)) for r in range(1, max(1, n_init))]
    best = None
    seen = set()
    for start in starts:
        key = tuple(sorted(start.tolist()))
        if key in seen:
            continue
        seen.add(key)
        run = _refine_medoids(D, start, max_iter)
        if best is None or run[2] < best[2]:
            best = run
    medoids, slot, obj, it, history = best
    return ClusterAssignment(slot, k, obj, it, seed, history, medoids=medoids)


def median_distance(X) -> float:
    D = pairwise_distances(X)
    iu = np.triu_indices(D.shape[0], k=1)
    return float(np.median(D[iu])) if iu[0].size else 0.0


def spectral_embedding(X, k: int, sigma="median") -> np.ndarray:
    """Row-normalized top-k eigenvectors of ``D^-1/2 A D^-1/2`` with an RBF affinity."""
    X = np.asarray(X, dtype=float)
    if sigma == "median":
        sigma = median_distance(X)
    sigma = float(sigma)
    if not sigma > 0:
        sigma = 1.0
    A = np.exp(-_sq_dists(X, X) / (2.0 * sigma * sigma))
    np.fill_diagonal(A, 0.0)
    deg = A.sum(axis=1)
    inv = np.zeros_like(deg)
    inv[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    L = inv[:, None] * A * inv[None, :]
    U = jacobi_eigen(L).eigenvectors[:, :k]
    norms = np.sqrt((U * U).sum(axis=1))
    live = norms > 0
    U[live] /= norms[live, None]
    return U


def spectral(X, k: int, seed: int = 0, sigma="median") -> ClusterAssignment:
    """Ng-Jordan-Weiss spectral clustering; k-means runs on the embedded rows."""
    X = np.asarray(X, dtype=float)
    _check_k(X.shape[0], k)
    U = spectral_embedding(X, k, sigma)
    inner = kmeans(U, k, seed=derive_seed(seed, "spectral"))
    inner.seed = seed
    inner.embedding = U
    return inner


ALGORITHMS = {"kmeans": kmeans, "kmedoids": kmedoids, "spectral": spectral}
