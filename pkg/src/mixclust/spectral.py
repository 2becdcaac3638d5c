"""Spectral initialisation: rank-k SVD embedding followed by k-means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .families import Family
from .model import make_rng


@dataclass(frozen=True)
class SpectralConfig:
    k: int
    restarts: int = 10
    lloyd_iters: int = 20
    seed: int = 0
    apply_sufficient_stat: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.lloyd_iters < 1:
            raise ValueError("lloyd_iters must be >= 1")


def embed(Y, k: int) -> np.ndarray:
    """Coordinates of each row on the k leading right singular directions.

    Always returns ``n x k``; missing directions (rank < k) are zero columns.
    """
    Y = np.asarray(Y, dtype=float)
    U, s, _ = np.linalg.svd(Y, full_matrices=False)
    r = min(k, s.size)
    M = np.zeros((Y.shape[0], k))
    M[:, :r] = U[:, :r] * s[:r]
    return M


def _sq_dists(M, centers):
    return ((M[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeans_pp(M, k: int, rng: np.random.Generator) -> np.ndarray:
    n = M.shape[0]
    centers = np.empty((k, M.shape[1]))
    centers[0] = M[rng.integers(n)]
    closest = ((M - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[j] = M[idx]
        closest = np.minimum(closest, ((M - centers[j]) ** 2).sum(axis=1))
    return centers


def lloyd(M, centers, iters: int):
    """Plain k-means iterations; an empty cluster keeps its previous centre."""
    centers = centers.copy()
    k = centers.shape[0]
    z = np.argmin(_sq_dists(M, centers), axis=1)
    for _ in range(iters):
        for a in range(k):
            members = M[z == a]
            if members.shape[0]:
                centers[a] = members.mean(axis=0)
        z_new = np.argmin(_sq_dists(M, centers), axis=1)
        if np.array_equal(z_new, z):
            break
        z = z_new
    D = _sq_dists(M, centers)
    return z, float(D[np.arange(M.shape[0]), z].sum())


def kmeans(M, k: int, restarts: int, iters: int, seed: int):
    """Best of ``restarts`` seeded k-means++ + Lloyd runs.

    Restart r draws from the stream keyed by ``(seed, r)``, so the first R
    restarts are the same whatever the total. Returns ``(labels, wcss)``;
    ties between restarts go to the lowest index.
    """
    best = None
    for r in range(restarts):
        rng = make_rng(seed, 2, r)
        z, wcss = lloyd(M, kmeans_pp(M, k, rng), iters)
        if best is None or wcss < best[1]:
            best = (z, wcss)
    return best


def spectral_init(X, cfg: SpectralConfig, families: Optional[Sequence[Family]] = None) -> np.ndarray:
    """Initial labels from k-means on the rank-k SVD embedding of the data."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < cfg.k:
        raise ValueError(f"need at least k={cfg.k} points, got {n}")
    if cfg.apply_sufficient_stat:
        if families is None:
            raise ValueError("apply_sufficient_stat requires the coordinate families")
        if isinstance(families, Family):
            families = [families] * X.shape[1]
        Y = np.column_stack([fam.u(X[:, l]) for l, fam in enumerate(families)])
    else:
        Y = X
    M = embed(Y, cfg.k)
    z, _ = kmeans(M, cfg.k, cfg.restarts, cfg.lloyd_iters, cfg.seed)
    return z.astype(np.int64)
