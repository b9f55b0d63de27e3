"""Synthetic BMS corpus: one CSV per device plus a ``filename,label`` sidecar.

Each generator draws per-device parameters, produces an hourly signal and the
writer samples it at irregular sub-hourly times with dropped rows, a few
multi-hour outages, duplicated timestamps and the odd unparseable row, so the
ingest path is exercised the same way a real BMS dump would exercise it.

Built-in types
--------------
temperature
    daily sinusoid: level U(18, 24), amplitude U(2, 6), Gaussian noise sd 0.3
humidity
    random walk reflected into [30, 70] %, hourly steps N(0, 0.8^2)
brightness
    day/night square wave: day level U(300, 800) lux from ~07:00 to ~19:00,
    night level U(0, 20), multiplicative noise 5 %
motion
    sparse binary spikes, firing probability U(0.03, 0.08) per hour
power
    load-profile sawtooth: base U(100, 300) W, amplitude U(500, 1500) W,
    period drawn from {8, 12, 24} h, noise sd 2 % of amplitude
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from ..errors import BadSpec
from ..fileio import atomic_write
from ..rng import rng_for

EPOCH_2014 = 1388534400
MIN_LENGTH = 720


def temperature(hours, rng):
    level = rng.uniform(18, 24)
    amp = rng.uniform(2, 6)
    phase = rng.uniform(0, 24)
    return level + amp * np.sin(2 * np.pi * (hours - phase) / 24.0) + rng.normal(0, 0.3, hours.size)


def humidity(hours, rng):
    n = int(np.ceil(hours.max())) + 2
    walk = np.empty(n)
    walk[0] = rng.uniform(40, 60)
    steps = rng.normal(0, 0.8, n)
    for i in range(1, n):
        v = walk[i - 1] + steps[i]
        if v > 70:
            v = 140 - v
        elif v < 30:
            v = 60 - v
        walk[i] = v
    return np.interp(hours, np.arange(n), walk) + rng.normal(0, 0.2, hours.size)


def brightness(hours, rng):
    day = rng.uniform(300, 800)
    night = rng.uniform(0, 20)
    rise = 7 + rng.uniform(-1, 1)
    dusk = 19 + rng.uniform(-1, 1)
    tod = np.mod(hours, 24.0)
    base = np.where((tod >= rise) & (tod < dusk), day, night)
    return np.maximum(0.0, base * (1 + rng.normal(0, 0.05, hours.size)))


def motion(hours, rng):
    p = rng.uniform(0.03, 0.08)
    n = int(np.ceil(hours.max())) + 2
    fired = (rng.random(n) < p).astype(float)
    return fired[np.floor(hours).astype(int)]


def power(hours, rng):
    base = rng.uniform(100, 300)
    amp = rng.uniform(500, 1500)
    period = float(rng.choice([8, 12, 24]))
    phase = rng.uniform(0, period)
    ramp = np.mod(hours - phase, period) / period
    return base + amp * ramp + rng.normal(0, 0.02 * amp, hours.size)


GENERATORS = {
    "temperature": temperature,
    "humidity": humidity,
    "brightness": brightness,
    "motion": motion,
    "power": power,
}


def _sample_times(length: int, rng) -> np.ndarray:
    """Sampling offsets in hours: every 15 min with jitter, drops and interior outages."""
    t = np.arange(0, length * 4) / 4.0 + rng.uniform(-0.04, 0.04, length * 4)
    t = np.clip(t, 0.0, length - 1e-3)
    t[0], t[-1] = 0.0, length - 0.01
    keep = rng.random(t.size) > 0.05
    for _ in range(int(rng.integers(1, 4))):
        start = rng.uniform(24, length - 48)
        keep &= ~((t >= start) & (t < start + rng.uniform(2, 6)))
    keep[0] = keep[-1] = True
    return np.sort(t[keep])


def _render_csv(epoch_start: int, hours: np.ndarray, values: np.ndarray, rng) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "v"])
    secs = epoch_start + np.floor(hours * 3600).astype(np.int64)
    for s, v in zip(secs, values):
        w.writerow([int(s), f"{v:.4f}"])
        u = rng.random()
        if u < 0.002:
            w.writerow([int(s), f"{v + rng.normal(0, 0.01):.4f}"])  # duplicated timestamp
        elif u < 0.004:
            w.writerow([int(s) + 1, "NaN" if u < 0.003 else "err"])
    return buf.getvalue()


def generate_synthetic_corpus(out_dir, types=None, files_per_type: int = 40, length: int = 960,
                              seed: int = 0, n_corrupt: int = 0) -> Path:
    """Write ``len(types) * files_per_type`` device files and ``labels.csv``.

    ``types`` is a list of names from :data:`GENERATORS` or a ``{name: fn}``
    mapping, where ``fn(hours, rng)`` returns one value per sample time.
    ``n_corrupt`` extra unreadable files are listed in the sidecar too.
    Output is a pure function of the arguments.
    """
    if length < MIN_LENGTH:
        raise BadSpec(f"length must be >= {MIN_LENGTH} hours, got {length}")
    if files_per_type < 1:
        raise BadSpec("files_per_type must be positive")
    if types is None:
        types = list(GENERATORS)
    if isinstance(types, int):
        if not 1 <= types <= len(GENERATORS):
            raise BadSpec(f"between 1 and {len(GENERATORS)} built-in types are available")
        types = list(GENERATORS)[:types]
    gens = dict(types) if isinstance(types, dict) else {}
    if not gens:
        for name in types:
            if name not in GENERATORS:
                raise BadSpec(f"unknown generator type {name!r}")
            gens[name] = GENERATORS[name]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sidecar = [("filename", "label")]
    for name, fn in gens.items():
        for i in range(files_per_type):
            rng = rng_for(seed, "synth", name, i)
            start = EPOCH_2014 + int(rng.integers(0, 365)) * 86400
            hours = _sample_times(length, rng)
            values = fn(hours + (start // 3600) % 24, rng)
            fname = f"{name}_{i:03d}.csv"
            atomic_write(out / fname, _render_csv(start, hours, values, rng))
            sidecar.append((fname, name))
    names = list(gens)
    for i in range(n_corrupt):
        fname = f"corrupt_{i:03d}.csv"
        atomic_write(out / fname, "t,v\nnot-a-time,not-a-number\n" if i % 2 == 0 else "time;value\n1;2\n")
        sidecar.append((fname, names[i % len(names)]))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(sidecar)
    atomic_write(out / "labels.csv", buf.getvalue())
    return out
