"""Image-encoded time series: recurrence images of a delay-embedded window.

A fixed-length window is embedded into 2-D phase space, the pairwise distance
matrix of the trajectory is taken as a grayscale image (or thresholded into a
binary recurrence plot), pooled down to ``d x d`` blocks and flattened.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, DegenerateTrajectory, SeriesTooShort, WindowTooShort

WINDOW = 720
DIMS = (8, 16, 32, 48)
MODES = ("gray", "binary")


@dataclass(frozen=True)
class Trajectory:
    points: np.ndarray  # (N, m)
    tau: int
    m: int = 2

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class RecurrenceImage:
    cells: np.ndarray
    mode: str
    epsilon: float | None = None

    @property
    def size(self) -> int:
        return self.cells.shape[0]


@dataclass(frozen=True)
class IetsVector:
    dim: int
    values: np.ndarray
    mode: str
    tau: int
    eps_quantile: float
    window_start: int = 0
    window_length: int = WINDOW


def select_window(series, length: int = WINDOW, offset: int = 0) -> np.ndarray:
    """``length`` consecutive values starting at ``offset`` (default: the prefix)."""
    x = np.asarray(getattr(series, "values", series), dtype=float)
    if offset < 0 or len(x) < offset + length:
        raise SeriesTooShort(f"need {offset + length} points for the window, series has {len(x)}")
    return x[offset:offset + length]


def embed(window, tau: int = 1, m: int = 2) -> Trajectory:
    """Delay embedding: point i is ``(w[i], w[i+tau], ..., w[i+(m-1)tau])``."""
    w = np.asarray(window, dtype=float)
    if tau < 1 or m < 1:
        raise ValueError("tau and m must be positive")
    n = len(w) - tau * (m - 1)
    if n < 1 or len(w) <= tau:
        raise WindowTooShort(f"window of {len(w)} too short for tau={tau}, m={m}")
    pts = np.column_stack([w[k * tau:k * tau + n] for k in range(m)])
    return Trajectory(pts, tau, m)


def distance_matrix(points: np.ndarray) -> np.ndarray:
    """Euclidean pairwise distances, coordinates accumulated in order."""
    acc = None
    for k in range(points.shape[1]):
        col = points[:, k]
        diff = col[:, None] - col[None, :]
        acc = diff * diff if acc is None else acc + diff * diff
    return np.sqrt(acc)


def recurrence(traj: Trajectory, mode: str = "gray", eps_quantile: float = 0.1) -> RecurrenceImage:
    """Recurrence image of a trajectory.

    ``gray`` returns the raw distance matrix. ``binary`` thresholds it at the
    ``eps_quantile`` quantile of the off-diagonal distances, with a cell set
    to 1 when the distance is at most epsilon.
    """
    if len(traj) < 2:
        raise DegenerateTrajectory(f"need at least 2 trajectory points, got {len(traj)}")
    dist = distance_matrix(traj.points)
    if mode == "gray":
        return RecurrenceImage(dist, "gray")
    if mode != "binary":
        raise ValueError(f"unknown recurrence mode {mode!r}")
    if not 0.0 < eps_quantile < 1.0:
        raise ValueError("eps_quantile must lie in (0, 1)")
    iu = np.triu_indices(len(traj), k=1)
    eps = float(np.quantile(dist[iu], eps_quantile))
    return RecurrenceImage((dist <= eps).astype(float), "binary", eps)


def block_sizes(n: int, d: int) -> np.ndarray:
    """Sizes of ``d`` contiguous blocks covering ``n``; the first ``n % d`` get one extra."""
    sizes = np.full(d, n // d, dtype=np.int64)
    sizes[: n % d] += 1
    return sizes


def downsample(image, d: int) -> np.ndarray:
    """Pool a square matrix into ``d x d`` block means.

    Block sums are exactly rounded, so the result does not depend on the
    summation order.
    """
    cells = np.asarray(getattr(image, "cells", image), dtype=float)
    n = cells.shape[0]
    if cells.ndim != 2 or cells.shape[1] != n:
        raise BadDimension("downsample expects a square matrix")
    if not 2 <= d <= n:
        raise BadDimension(f"target dimension {d} outside [2, {n}]")
    edges = np.concatenate([[0], np.cumsum(block_sizes(n, d))])
    out = np.empty((d, d))
    for a in range(d):
        rows = cells[edges[a]:edges[a + 1]]
        for b in range(d):
            block = rows[:, edges[b]:edges[b + 1]]
            out[a, b] = math.fsum(block.ravel().tolist()) / block.size
    return out


def iets_vector(series, d: int = 48, mode: str = "gray", tau: int = 1, eps_quantile: float = 0.1,
                offset: int = 0, length: int = WINDOW) -> IetsVector:
    """Window, embed, encode, pool and flatten (row-major) one series."""
    window = select_window(series, length, offset)
    image = recurrence(embed(window, tau), mode, eps_quantile)
    flat = downsample(image, d).ravel()
    return IetsVector(d, flat, mode, tau, eps_quantile, offset, length)


def iets_vectors(series, dims=DIMS, mode: str = "gray", tau: int = 1, eps_quantile: float = 0.1,
                 offset: int = 0, length: int = WINDOW) -> dict[int, np.ndarray]:
    """Encode once and pool at several dimensions; ``{d: flattened vector}``."""
    window = select_window(series, length, offset)
    image = recurrence(embed(window, tau), mode, eps_quantile)
    return {d: downsample(image, d).ravel() for d in dims}


def render_pgm(image) -> bytes:
    """Binary greyscale PGM (P5). Smallest value is white, largest black."""
    cells = np.asarray(getattr(image, "cells", image), dtype=float)
    if cells.ndim != 2 or cells.size == 0:
        raise ValueError("render_pgm needs a non-empty 2-D matrix")
    lo, hi = float(cells.min()), float(cells.max())
    if hi == lo:
        pixels = np.full(cells.shape, 255, dtype=np.uint8)
    else:
        scaled = 255.0 * (hi - cells) / (hi - lo)
        pixels = np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)
    rows, cols = cells.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes()
