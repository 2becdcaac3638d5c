"""Dataset and label files. Labels on disk are 1-based, one per line."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def read_data(path) -> np.ndarray:
    X = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{path}: non-finite entries")
    return X


def write_data(path, X) -> None:
    np.savetxt(path, np.asarray(X, dtype=float), delimiter=",", fmt="%.17g")


def read_labels(path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            value = int(line)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected an integer label, got {line!r}") from None
        if value < 1:
            raise ValueError(f"{path}:{lineno}: labels are 1-based, got {value}")
        out.append(value - 1)
    return np.asarray(out, dtype=np.int64)


def write_labels(path, z) -> None:
    z = np.asarray(z, dtype=np.int64) + 1
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(f"{v}\n" for v in z))
