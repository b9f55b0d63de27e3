"""Cosine similarity, per-label signature vectors and cosine-distance (CD) features."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyLabel, LengthMismatch, ZeroVector
from .rng import rng_for

log = logging.getLogger(__name__)

SIGNATURE_SAMPLES = 20


def cosine_similarity(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"vector lengths differ: {x.shape} vs {y.shape}")
    nx = math.sqrt(float(np.dot(x, x)))
    ny = math.sqrt(float(np.dot(y, y)))
    if nx == 0.0 or ny == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return min(1.0, max(-1.0, float(np.dot(x, y)) / (nx * ny)))


@dataclass(frozen=True)
class SignatureSet:
    signatures: np.ndarray  # (K, d), row j is the signature of label j
    sample_counts: tuple[int, ...]
    seed: int

    def __len__(self) -> int:
        return self.signatures.shape[0]


def build_signatures(X, y, n_labels: int | None = None, samples_per_label: int | None = SIGNATURE_SAMPLES,
                     seed: int = 0) -> SignatureSet:
    """Mean of up to ``samples_per_label`` distinct, uniformly drawn instances per label.

    ``samples_per_label=None`` uses every instance of each label.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    K = int(y.max()) + 1 if n_labels is None else n_labels
    sigs = np.empty((K, X.shape[1]))
    counts = []
    for j in range(K):
        idx = np.flatnonzero(y == j)
        if idx.size == 0:
            raise EmptyLabel(f"label {j} has no instances")
        take = idx.size if samples_per_label is None else min(samples_per_label, idx.size)
        chosen = np.sort(rng_for(seed, "signature", j).choice(idx, size=take, replace=False))
        sigs[j] = X[chosen].mean(axis=0)
        counts.append(int(take))
    return SignatureSet(sigs, tuple(counts), seed)


def zscore_columns(X, reference=None):
    """Standardize columns with statistics of ``reference`` (default ``X``)."""
    X = np.asarray(X, dtype=float)
    ref = X if reference is None else np.asarray(reference, dtype=float)
    sd = ref.std(axis=0)
    live = sd > 0
    mu = np.where(live, ref.mean(axis=0), 0.0)
    return (X - mu) / np.where(live, sd, 1.0)


def cd_features(X, signatures: SignatureSet) -> np.ndarray:
    """``m x n`` matrix of cosine similarities between instances and label signatures.

    An instance (or signature) with zero norm yields zeros in its row (column).
    """
    X = np.asarray(X, dtype=float)
    S = signatures.signatures
    if X.shape[1] != S.shape[1]:
        raise LengthMismatch(f"instances have {X.shape[1]} features, signatures {S.shape[1]}")
    out = np.zeros((X.shape[0], S.shape[0]))
    for i, row in enumerate(X):
        if not np.any(row):
            log.warning("instance %d has a zero feature vector; CD row set to 0", i)
            continue
        for j, sig in enumerate(S):
            if not np.any(sig):
                continue
            out[i, j] = cosine_similarity(row, sig)
    return out


def label_polar_table(vectors, names, reference: int = 0) -> list[tuple[str, str, float, float]]:
    """Rows ``(label, reference, similarity, angle_deg)`` sorted by angle.

    Similarities are signature-vs-signature; the reference label sits at 0 deg.
    """
    V = np.asarray(vectors, dtype=float)
    if V.shape[0] < 2:
        raise ValueError("need at least two labels for a polar table")
    ref_name = names[reference]
    rows = []
    for j, name in enumerate(names):
        sim = 1.0 if j == reference else cosine_similarity(V[j], V[reference])
        rows.append((name, ref_name, sim, math.degrees(math.acos(sim))))
    rows.sort(key=lambda r: (r[3], r[0] != ref_name, r[0]))
    return rows


def polar_table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "reference", "similarity", "angle_deg"])
    for label, ref, sim, ang in rows:
        w.writerow([label, ref, repr(float(sim)), repr(float(ang))])
    return buf.getvalue()
