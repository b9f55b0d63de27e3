"""Small file helpers shared by the CLI and the study runner."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def atomic_write(path, data) -> Path:
    """Write ``data`` (str or bytes) to ``path`` via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else bytes(data)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def format_float(x: float) -> str:
    # repr round-trips exactly, which keeps feature files byte-reproducible
    return repr(float(x))


def features_to_csv(instance_ids, labels, X) -> str:
    """Feature table with header ``instance_id,label,f0..f{d-1}``."""
    X = np.asarray(X, dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance_id", "label"] + [f"f{j}" for j in range(X.shape[1])])
    for iid, lab, row in zip(instance_ids, labels, X):
        w.writerow([iid, lab] + [format_float(v) for v in row])
    return buf.getvalue()


def read_features_csv(path):
    """Inverse of :func:`features_to_csv`; returns ``(ids, labels, X)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["instance_id", "label"]:
        from .errors import MalformedHeader

        raise MalformedHeader(f"{path}: expected header starting with instance_id,label")
    body = rows[1:]
    ids = [r[0] for r in body]
    labels = [r[1] for r in body]
    X = np.array([[float(v) for v in r[2:]] for r in body], dtype=float).reshape(len(body), len(rows[0]) - 2)
    return ids, labels, X
