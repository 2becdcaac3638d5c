"""Mixture specifications, balanced label generation and synthetic sampling.

Labels are 0-based ``int64`` arrays inside the library; files on disk are
1-based (see :mod:`mixclust.io`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .families import Family

#: rows per independent RNG stream in :func:`sample_dataset`
BLOCK_ROWS = 4096


def make_rng(*key: int) -> np.random.Generator:
    """Counter-based generator keyed by a tuple of nonnegative integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    """k clusters x d coordinates of per-coordinate family parameters.

    ``params`` has shape ``(k, d, P)`` where ``P`` is the largest
    ``n_params`` among the families; unused trailing slots hold NaN.
    """

    families: tuple
    params: np.ndarray

    def __init__(self, families: Union[Family, Sequence[Family]], params):
        params = np.asarray(params, dtype=float)
        if params.ndim == 2:
            params = params[..., None]
        if params.ndim != 3:
            raise ValueError("params must have shape (k, d) or (k, d, P)")
        k, d, _ = params.shape
        if isinstance(families, Family):
            families = [families] * d
        families = tuple(families)
        if len(families) != d:
            raise ValueError(f"got {len(families)} families for d={d}")
        if k < 2:
            raise ValueError("a mixture needs k >= 2 clusters")
        width = max(f.n_params for f in families)
        grid = np.full((k, d, width), np.nan)
        for l, fam in enumerate(families):
            if params.shape[2] < fam.n_params:
                raise ValueError(f"coordinate {l + 1}: {fam.name} needs {fam.n_params} values per cell")
            cell = params[:, l, : fam.n_params]
            fam.validate(cell)
            grid[:, l, : fam.n_params] = cell
        for a in range(k):
            for b in range(a + 1, k):
                if _same_row(grid[a], grid[b]):
                    raise ValueError(f"clusters {a + 1} and {b + 1} have identical parameters")
        grid.setflags(write=False)
        object.__setattr__(self, "families", families)
        object.__setattr__(self, "params", grid)

    @classmethod
    def unchecked(cls, families, params) -> "MixtureSpec":
        """Build without the distinct-rows check (used for fitted models)."""
        obj = object.__new__(cls)
        params = np.array(params, dtype=float)
        if params.ndim == 2:
            params = params[..., None]
        if isinstance(families, Family):
            families = [families] * params.shape[1]
        params.setflags(write=False)
        object.__setattr__(obj, "families", tuple(families))
        object.__setattr__(obj, "params", params)
        return obj

    @property
    def k(self) -> int:
        return self.params.shape[0]

    @property
    def d(self) -> int:
        return self.params.shape[1]

    @property
    def expfam(self) -> bool:
        return all(f.expfam for f in self.families)

    def cell(self, a: int, l: int) -> np.ndarray:
        return self.params[a, l, : self.families[l].n_params]

    def column(self, l: int) -> np.ndarray:
        """Parameters of coordinate ``l`` for every cluster, shape ``(k, n_params)``."""
        return self.params[:, l, : self.families[l].n_params]

    def family_name(self) -> str:
        names = []
        for f in self.families:
            if f.name not in names:
                names.append(f.name)
        return "+".join(names)

    def permuted(self, order) -> "MixtureSpec":
        """Spec whose cluster ``a`` is this spec's cluster ``order[a]``."""
        return MixtureSpec.unchecked(self.families, self.params[np.asarray(order)])


def _same_row(r1, r2) -> bool:
    return bool(np.all((r1 == r2) | (np.isnan(r1) & np.isnan(r2))))


def make_labels(n: int, k: int, alpha: float, seed: int) -> np.ndarray:
    """Random labels in which every cluster holds at least floor(alpha n / k) points."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    floor_size = int(np.floor(alpha * n / k + 1e-12))
    if floor_size < 1:
        raise ValueError(f"cannot give each of {k} clusters >= alpha n / k points with n={n}")
    rng = make_rng(seed, 0)
    base = np.repeat(np.arange(k), floor_size)
    rest = rng.integers(0, k, size=n - base.size)
    z = np.concatenate([base, rest])
    return rng.permutation(z).astype(np.int64)


def check_labels(z, k: int, n: int | None = None) -> np.ndarray:
    z = np.asarray(z)
    if z.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if n is not None and z.size != n:
        raise ValueError(f"expected {n} labels, got {z.size}")
    if z.size and (not np.issubdtype(z.dtype, np.integer) and np.any(z != np.round(z))):
        raise ValueError("labels must be integers")
    z = z.astype(np.int64)
    if z.size and (z.min() < 0 or z.max() >= k):
        raise ValueError(f"labels must lie in [1, {k}]")
    return z


def sample_dataset(spec: MixtureSpec, z, seed: int) -> np.ndarray:
    """Draw X[i, l] ~ families[l](params[z[i], l]) independently.

    Rows are generated in blocks of ``BLOCK_ROWS``, each with its own
    stream keyed by ``(seed, block)``, so blocks can be drawn in any order.
    """
    z = check_labels(z, spec.k)
    n = z.size
    X = np.empty((n, spec.d))
    for start in range(0, n, BLOCK_ROWS):
        rng = make_rng(seed, 1, start // BLOCK_ROWS)
        zb = z[start : start + BLOCK_ROWS]
        for l, fam in enumerate(spec.families):
            X[start : start + zb.size, l] = fam.sample(spec.column(l)[zb], rng)
    return X


def loglik_matrix(spec: MixtureSpec, X) -> np.ndarray:
    """L[i, a] = log f_a(X_i) summed over coordinates."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != spec.d:
        raise ValueError(f"data has {X.shape[1]} columns, spec has d={spec.d}")
    L = np.zeros((X.shape[0], spec.k))
    for l, fam in enumerate(spec.families):
        L += fam.logpdf(X[:, l, None], spec.column(l)[None, :, :])
    return L


def log_density(spec: MixtureSpec, a: int, x) -> float:
    """log f_a(x) for a single point ``x`` (cluster index 0-based)."""
    if not 0 <= a < spec.k:
        raise ValueError(f"cluster index {a} out of range for k={spec.k}")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(loglik_matrix(spec, x)[0, a])
