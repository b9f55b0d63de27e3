"""Parse raw device CSV dumps, regularize them to hourly resolution, fill gaps."""

from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from functools import partial
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import AllMissing, DataError, EmptyFile, MalformedHeader, NoFiles
from .parallel import pmap

log = logging.getLogger(__name__)

HOUR = 3600


@dataclass(frozen=True)
class FormatSpec:
    """Column layout of a raw device file.

    ``timestamp_kind`` is ``"epoch"`` (seconds since epoch), ``"iso"``
    (ISO-8601, naive values read as UTC) or ``"auto"`` (epoch if the cell
    parses as a number, ISO otherwise).
    """

    timestamp_col: str = "t"
    value_col: str = "v"
    timestamp_kind: str = "auto"
    delimiter: str = ","


@dataclass
class RawSeries:
    device_id: str
    label_name: str
    timestamps: np.ndarray  # float seconds, strictly increasing
    values: np.ndarray
    skipped_rows: int = 0

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass
class HourlySlots:
    """Hourly buckets; ``values`` is NaN where a slot received no samples."""

    device_id: str
    label_name: str
    start_hour: int
    values: np.ndarray

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)


@dataclass
class RegularSeries:
    device_id: str
    label_id: int
    values: np.ndarray
    start_hour: int
    label_name: str = ""

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class LabelTable:
    names: list[str]
    lookup: dict[str, int] = field(init=False)

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("label names must be distinct")
        self.lookup = {n: i for i, n in enumerate(self.names)}

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "LabelTable":
        return cls(sorted(set(labels)))

    def __len__(self) -> int:
        return len(self.names)

    def encode(self, name: str) -> int:
        return self.lookup[name]

    def decode(self, label_id: int) -> str:
        return self.names[label_id]


def _parse_timestamp(cell: str, kind: str) -> float:
    cell = cell.strip()
    if kind in ("epoch", "auto"):
        try:
            return float(cell)
        except ValueError:
            if kind == "epoch":
                raise
    if cell.endswith("Z"):
        cell = cell[:-1] + "+00:00"
    dt = datetime.fromisoformat(cell)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def parse_series(file_bytes: bytes, fmt: FormatSpec = FormatSpec(), device_id: str = "",
                 label_name: str = "") -> RawSeries:
    """Parse one CSV dump into a sorted, de-duplicated :class:`RawSeries`.

    Rows whose timestamp or value cannot be parsed (or is not finite) are
    skipped and counted in ``skipped_rows``. Readings sharing a timestamp are
    averaged.
    """
    text = file_bytes.decode("utf-8-sig") if isinstance(file_bytes, (bytes, bytearray)) else str(file_bytes)
    if not text.strip():
        raise EmptyFile(f"{device_id or 'input'}: file is empty")
    reader = csv.reader(io.StringIO(text), delimiter=fmt.delimiter)
    header = [h.strip() for h in next(reader)]
    try:
        ti = header.index(fmt.timestamp_col)
        vi = header.index(fmt.value_col)
    except ValueError:
        raise MalformedHeader(
            f"{device_id or 'input'}: header {header!r} lacks {fmt.timestamp_col!r}/{fmt.value_col!r}"
        ) from None

    ts, vs = [], []
    skipped = 0
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        try:
            t = _parse_timestamp(row[ti], fmt.timestamp_kind)
            v = float(row[vi])
        except (ValueError, IndexError, OverflowError):
            skipped += 1
            continue
        if not (math.isfinite(t) and math.isfinite(v)):
            skipped += 1
            continue
        ts.append(t)
        vs.append(v)
    if not ts:
        raise EmptyFile(f"{device_id or 'input'}: no valid rows ({skipped} skipped)")

    t_arr = np.asarray(ts, dtype=float)
    v_arr = np.asarray(vs, dtype=float)
    uniq, inverse = np.unique(t_arr, return_inverse=True)
    sums = np.bincount(inverse, weights=v_arr, minlength=len(uniq))
    counts = np.bincount(inverse, minlength=len(uniq))
    return RawSeries(device_id, label_name, uniq, sums / counts, skipped)


def resample_hourly(raw: RawSeries) -> HourlySlots:
    """Average readings into left-closed hourly buckets ``[h*3600, (h+1)*3600)``."""
    hours = np.floor(raw.timestamps / HOUR).astype(np.int64)
    start = int(hours[0])
    idx = hours - start
    n = int(idx[-1]) + 1
    sums = np.bincount(idx, weights=raw.values, minlength=n)
    counts = np.bincount(idx, minlength=n)
    out = np.full(n, np.nan)
    filled = counts > 0
    out[filled] = sums[filled] / counts[filled]
    return HourlySlots(raw.device_id, raw.label_name, start, out)


def interpolate_gaps(slots: HourlySlots, label_id: int = 0) -> RegularSeries:
    """Fill interior gaps linearly and extend edge gaps with the nearest value."""
    vals = np.asarray(slots.values, dtype=float)
    known = ~np.isnan(vals)
    if not known.any():
        raise AllMissing(f"{slots.device_id or 'series'}: every hourly slot is missing")
    if known.all():
        filled = vals.copy()
    else:
        pos = np.flatnonzero(known)
        filled = np.interp(np.arange(len(vals)), pos, vals[pos])
        filled[known] = vals[known]
    return RegularSeries(slots.device_id, label_id, filled, slots.start_hour, slots.label_name)


# label rules -------------------------------------------------------------

class SidecarLabels:
    """Labels from a ``filename,label`` CSV next to the data files."""

    def __init__(self, path):
        self.path = Path(path)
        with open(self.path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0][:2]] != ["filename", "label"]:
            raise MalformedHeader(f"{self.path}: sidecar header must be 'filename,label'")
        self.mapping = {r[0].strip(): r[1].strip() for r in rows[1:] if len(r) >= 2}

    def __call__(self, filename: str) -> str:
        return self.mapping[filename]

    def excludes(self) -> set[str]:
        return {self.path.name}


class RegexLabels:
    """Label from a regex capture group applied to the file name."""

    def __init__(self, pattern: str, group=1):
        self.regex = re.compile(pattern)
        self.group = group

    def __call__(self, filename: str) -> str:
        m = self.regex.search(filename)
        if m is None:
            raise KeyError(filename)
        return m.group(self.group)

    def excludes(self) -> set[str]:
        return set()


@dataclass
class Corpus:
    series: list[RegularSeries]
    labels: LabelTable
    skipped: list[tuple[str, str]]
    n_files: int
    skipped_rows: int = 0

    @property
    def skip_count(self) -> int:
        return len(self.skipped)


def _load_one(path: Path, label_rule: Callable[[str], str], fmt: FormatSpec):
    try:
        label = label_rule(path.name)
    except KeyError:
        return path.name, None, "no label for file"
    try:
        raw = parse_series(path.read_bytes(), fmt, device_id=path.stem, label_name=label)
        series = interpolate_gaps(resample_hourly(raw))
    except (DataError, OSError, UnicodeDecodeError) as exc:
        return path.name, None, f"{type(exc).__name__}: {exc}"
    return path.name, (series, raw.skipped_rows), None


def load_corpus(directory, label_rule, fmt: FormatSpec = FormatSpec(), jobs: int = 1,
                pattern: str = "*.csv") -> Corpus:
    """Ingest every data file in ``directory``.

    Files that fail to parse are logged and skipped; the returned corpus
    reports them so ``len(series) + skip_count == n_files``. Files are merged
    in sorted-name order regardless of ``jobs``.
    """
    directory = Path(directory)
    exclude = label_rule.excludes() if hasattr(label_rule, "excludes") else set()
    files = sorted(p for p in directory.glob(pattern) if p.is_file() and p.name not in exclude)
    if not files:
        raise NoFiles(f"{directory}: no files matching {pattern!r}")

    results = pmap(partial(_load_one, label_rule=label_rule, fmt=fmt), files, jobs)
    loaded, skipped = [], []
    row_skips = 0
    for name, payload, reason in results:
        if payload is None:
            log.warning("skipping %s: %s", name, reason)
            skipped.append((name, reason))
        else:
            loaded.append(payload[0])
            row_skips += payload[1]

    table = LabelTable.from_labels([s.label_name for s in loaded])
    series = [replace(s, label_id=table.encode(s.label_name)) for s in loaded]
    log.info("loaded %d series (%d skipped) from %s, %d labels", len(series), len(skipped), directory, len(table))
    return Corpus(series, table, skipped, len(files), row_skips)
