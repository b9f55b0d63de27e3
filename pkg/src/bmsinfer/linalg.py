"""Dense symmetric eigensolver (cyclic Jacobi)."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NoConvergence

log = logging.getLogger(__name__)


def as_symmetric(A, rtol: float = 1e-8) -> np.ndarray:
    """Return ``(A + A.T) / 2`` after checking ``A`` is symmetric up to ``rtol``."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    scale = np.abs(A).max() if A.size else 0.0
    if np.abs(A - A.T).max() > rtol * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # column j pairs with eigenvalues[j]
    sweeps: int
    off_norm: float


@njit(cache=True)
def _off_norm(A):
    n = A.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s += A[i, j] * A[i, j]
    return np.sqrt(2.0 * s)


@njit(cache=True)
def _cyclic_jacobi(A, tol, max_sweeps):
    n = A.shape[0]
    V = np.eye(n)
    fro = np.sqrt(np.sum(A * A))
    off = _off_norm(A)
    sweep = 0
    while off > tol * fro and sweep < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    sgn = 1.0 if theta >= 0.0 else -1.0
                    t = sgn / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
        sweep += 1
        off = _off_norm(A)
    return np.diag(A).copy(), V, sweep, off, fro


def jacobi_eigen(A, tol: float = 1e-10, max_sweeps: int = 100) -> EigenDecomposition:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm falls to ``tol * ||A||_F``.
    Eigenpairs are sorted by descending eigenvalue (stable for ties) and each
    eigenvector is signed so its largest-magnitude entry is positive.

    Raises :class:`NoConvergence` if the sweep budget runs out with the
    off-diagonal norm still above ``1e-6 * ||A||_F``.
    """
    work = as_symmetric(A)
    w, V, sweeps, off, fro = _cyclic_jacobi(np.ascontiguousarray(work), float(tol), int(max_sweeps))
    if off > tol * fro:
        if off > 1e-6 * fro:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")
        log.warning("Jacobi stopped at sweep budget with off-norm %.3e", off)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[lead, np.arange(V.shape[1])] < 0, -1.0, 1.0)
    return EigenDecomposition(w, V * signs, sweeps, off)
