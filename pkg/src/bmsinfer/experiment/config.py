"""Run configuration, read from a ``key = value`` text file."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..classify import ALGORITHMS, DEFAULT_GRIDS
from ..errors import BadSpec
from ..iets import DIMS

FAMILIES = ("df", "cd") + tuple(f"iets{d}" for d in DIMS)


@dataclass
class RunConfig:
    # corpus: a directory, or empty for a synthetic corpus written under output
    corpus: str = ""
    label_rule: str = "sidecar:labels.csv"
    timestamp_col: str = "t"
    value_col: str = "v"
    timestamp_kind: str = "auto"
    manifest: str = ""
    synthetic_types: int = 5
    synthetic_files: int = 40
    synthetic_length: int = 960
    synthetic_seed: int = 7

    families: list[str] = field(default_factory=lambda: ["df", "cd", "iets8", "iets48"])
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    fractions: list[float] = field(default_factory=lambda: [0.2, 0.4, 0.7, 0.8])
    repeats: int = 5
    folds: int = 5
    seed: int = 0
    grids: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_GRIDS.items()})

    iets_mode: str = "gray"
    tau: int = 1
    eps_quantile: float = 0.1
    window_offset: int = 0
    signature_samples: int = 20
    cd_standardize: bool = False
    stationarity_stable: float = 0.5
    stationarity_unstable: float = 2.0

    cluster: bool = True
    cluster_algorithms: list[str] = field(default_factory=lambda: ["spectral", "kmedoids", "kmeans"])
    cluster_standardize: bool = True
    cluster_k: int = 0  # 0 means the number of labels
    spectral_sigma: str = "median"

    pgm_samples: int = 1  # recurrence images written per label
    output: str = "study-out"
    jobs: int = 1

    def validate(self) -> "RunConfig":
        if self.repeats < 1:
            raise BadSpec("repeats must be >= 1")
        if not all(0.0 < f < 1.0 for f in self.fractions):
            raise BadSpec("train fractions must lie in (0, 1)")
        for fam in self.families:
            if fam not in FAMILIES:
                raise BadSpec(f"unknown feature family {fam!r}; choose from {', '.join(FAMILIES)}")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise BadSpec(f"unknown algorithm {algo!r}")
        if self.iets_mode not in ("gray", "binary"):
            raise BadSpec("iets_mode must be gray or binary")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def _parse_scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("none", "null"):
        return None
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    return t


def _parse_list(text: str) -> list:
    return [_parse_scalar(p) for p in text.split(",") if p.strip()]


def parse_config(text: str, base: Path | None = None) -> RunConfig:
    """Parse ``key = value`` lines. List values are comma separated.

    Grid overrides use ``grid.<algorithm>.<param> = v1, v2``.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[study]\n" + text
    cp.read_string(text)
    section = cp[cp.sections()[0]] if cp.sections() else {}
    cfg = RunConfig()
    types = {f.name: f for f in fields(RunConfig)}
    for key, raw in section.items():
        if key.startswith("grid."):
            parts = key.split(".")
            if len(parts) != 3 or parts[1] not in ALGORITHMS:
                raise BadSpec(f"bad grid key {key!r}")
            cfg.grids.setdefault(parts[1], {})[parts[2]] = _parse_list(raw)
            continue
        if key not in types:
            raise BadSpec(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        if isinstance(current, list):
            value = _parse_list(raw)
            if key == "fractions":
                value = [float(v) for v in value]
        elif isinstance(current, bool):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(current, (int, float)):
            try:
                value = type(current)(raw)
            except ValueError:
                raise BadSpec(f"{key}: expected a number, got {raw.strip()!r}") from None
        else:
            value = raw.strip()
        setattr(cfg, key, value)
    if base is not None:
        for key in ("corpus", "output", "manifest"):
            val = getattr(cfg, key)
            if val and not Path(val).is_absolute():
                setattr(cfg, key, str((base / val).resolve()))
    return cfg.validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), base=path.parent)
