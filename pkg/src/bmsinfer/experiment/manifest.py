"""Checksum verification for user-supplied datasets (the tool never downloads data)."""

from __future__ import annotations

import hashlib
from pathlib import Path

from ..errors import DataError


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(root, pattern: str = "*.csv") -> str:
    root = Path(root)
    lines = [f"{sha256_file(p)}  {p.relative_to(root).as_posix()}" for p in sorted(root.rglob(pattern))]
    return "\n".join(lines) + "\n"


def verify_manifest(root, manifest) -> int:
    """Check every ``<sha256>  <relative path>`` line; returns the number of files verified."""
    root = Path(root)
    bad = []
    n = 0
    for line in Path(manifest).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        digest, _, rel = line.partition("  ")
        target = root / rel.strip()
        if not target.is_file():
            bad.append(f"missing {rel}")
        elif sha256_file(target) != digest.strip().lower():
            bad.append(f"checksum mismatch {rel}")
        n += 1
    if bad:
        raise DataError(f"{len(bad)} manifest problem(s): " + "; ".join(bad[:5]))
    return n
