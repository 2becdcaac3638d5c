"""Flat ``key = value`` model-spec files.

Example::

    # three-cluster Laplace mixture
    family = laplace
    k = 3
    d = 2
    params.1 = 0, 1          # cluster 1, every coordinate: location, scale
    params.2 = 3, 1
    params.3.1 = 6, 1        # cluster 3, coordinate 1
    params.3.2 = 6, 2
    n = 1000
    alpha = 1
    seed = 7

``family.<l>`` overrides the family of one coordinate; ``params`` alone
broadcasts to every cell. More specific keys win regardless of order.
Clusters and coordinates are numbered from 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .families import Family, parse_family
from .model import MixtureSpec

MODEL_KEYS = {"family", "k", "d", "n", "alpha", "seed"}
BENCH_KEYS = {"algos", "init", "tmax", "replicates", "master_seed", "output", "jobs", "restarts"}

_PARAM_KEY = re.compile(r"^params(?:\.(\d+)(?:\.(\d+))?)?$")
_FAMILY_KEY = re.compile(r"^family\.(\d+)$")


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<config>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass
class SpecFile:
    families: tuple
    k: int
    d: int
    spec: Optional[MixtureSpec] = None
    n: Optional[int] = None
    alpha: float = 1.0
    seed: int = 0
    extras: dict = field(default_factory=dict)  # bench keys -> (value, line)


def _number(text: str, line: int, source: str, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise ConfigError(f"expected {kind.__name__}, got {text!r}", line, source) from None
    return value


def parse_spec_text(text: str, source: str = "<config>", require_params: bool = True) -> SpecFile:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", lineno, source)
        key, value = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno, source)
        if not (key in MODEL_KEYS or key in BENCH_KEYS or _PARAM_KEY.match(key) or _FAMILY_KEY.match(key)):
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first set on line {entries[key][1]})", lineno, source)
        entries[key] = (value, lineno)

    def get(key, kind, default=None):
        if key not in entries:
            return default
        value, line = entries[key]
        return _number(value, line, source, kind)

    if "k" not in entries:
        raise ConfigError("missing required key 'k'", None, source)
    k = get("k", int)
    if k < 2:
        raise ConfigError("k must be >= 2", entries["k"][1], source)
    d = get("d", int, 1)
    if d < 1:
        raise ConfigError("d must be >= 1", entries["d"][1], source)

    families: list[Optional[Family]] = [None] * d
    if "family" in entries:
        value, line = entries["family"]
        try:
            families = [parse_family(value)] * d
        except ValueError as exc:
            raise ConfigError(str(exc), line, source) from None
    for key, (value, line) in entries.items():
        m = _FAMILY_KEY.match(key)
        if not m:
            continue
        l = int(m.group(1))
        if not 1 <= l <= d:
            raise ConfigError(f"coordinate {l} out of range 1..{d}", line, source)
        try:
            families[l - 1] = parse_family(value)
        except ValueError as exc:
            raise ConfigError(str(exc), line, source) from None
    if any(f is None for f in families):
        raise ConfigError("every coordinate needs a family (set 'family')", None, source)

    width = max(f.n_params for f in families)
    grid = np.full((k, d, width), np.nan)
    filled = np.zeros((k, d), dtype=bool)
    # broadcast order: params < params.a < params.a.l
    param_items = sorted(
        ((key, v) for key, v in entries.items() if _PARAM_KEY.match(key)),
        key=lambda item: item[0].count("."),
    )
    for key, (value, line) in param_items:
        m = _PARAM_KEY.match(key)
        a = int(m.group(1)) if m.group(1) else None
        l = int(m.group(2)) if m.group(2) else None
        if a is not None and not 1 <= a <= k:
            raise ConfigError(f"cluster {a} out of range 1..{k}", line, source)
        if l is not None and not 1 <= l <= d:
            raise ConfigError(f"coordinate {l} out of range 1..{d}", line, source)
        values = [_number(v.strip(), line, source) for v in value.split(",")]
        rows = range(k) if a is None else [a - 1]
        cols = range(d) if l is None else [l - 1]
        for c in cols:
            need = families[c].n_params
            if len(values) != need:
                raise ConfigError(
                    f"{families[c].name} takes {need} value(s) per cell, got {len(values)}", line, source
                )
            for r in rows:
                grid[r, c, :need] = values
                filled[r, c] = True

    spec = None
    if filled.any() or require_params:
        if not filled.all():
            a, l = np.argwhere(~filled)[0]
            raise ConfigError(f"no parameters for cluster {a + 1}, coordinate {l + 1}", None, source)
        try:
            spec = MixtureSpec(families, grid)
        except ValueError as exc:
            raise ConfigError(str(exc), None, source) from None

    n = get("n", int)
    alpha = get("alpha", float, 1.0)
    seed = get("seed", int, 0)
    extras = {key: entries[key] for key in BENCH_KEYS if key in entries}
    return SpecFile(tuple(families), k, d, spec, n, alpha, seed, extras)


def load_spec_file(path, require_params: bool = True) -> SpecFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read: {exc.strerror}", None, str(path)) from None
    return parse_spec_text(text, str(path), require_params)


def dump_spec(spec: MixtureSpec, **fields) -> str:
    """Render a spec (plus scalar fields such as n, seed) in file form."""
    lines = []
    names = {f.name for f in spec.families}
    if len(names) == 1:
        lines.append(f"family = {spec.families[0].name}")
    lines += [f"k = {spec.k}", f"d = {spec.d}"]
    if len(names) > 1:
        lines += [f"family.{l + 1} = {f.name}" for l, f in enumerate(spec.families)]
    for a in range(spec.k):
        for l in range(spec.d):
            cell = ", ".join(repr(float(v)) for v in spec.cell(a, l))
            lines.append(f"params.{a + 1}.{l + 1} = {cell}")
    for key, value in fields.items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
