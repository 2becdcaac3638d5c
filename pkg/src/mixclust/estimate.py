"""Per-cluster parameter estimators used by the iterative algorithms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .families import Family, GaussianDiagonal, Laplace

SCALE_FLOOR = 1e-8


class EmptyClusterError(ValueError):
    """Raised when an estimator receives no points."""


@dataclass
class FitResult:
    params: np.ndarray  # (k, d, P), same layout as MixtureSpec.params
    empty_clusters: set = field(default_factory=set)


def _points(points) -> np.ndarray:
    Y = np.asarray(points, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.shape[0] == 0:
        raise EmptyClusterError("cannot estimate parameters from an empty cluster")
    return Y


def laplace_fit(points) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and mean absolute deviation about it, per coordinate."""
    Y = _points(points)
    mu = Y.mean(axis=0)
    sigma = np.abs(Y - mu).mean(axis=0)
    return mu, np.maximum(sigma, SCALE_FLOOR)


def gaussian_fit(points) -> tuple[np.ndarray, np.ndarray]:
    Y = _points(points)
    mu = Y.mean(axis=0)
    sd = np.sqrt(((Y - mu) ** 2).mean(axis=0))
    return mu, np.maximum(sd, SCALE_FLOOR)


def expfam_fit(points, families: Sequence[Family]) -> np.ndarray:
    """Mean of the sufficient statistic per coordinate, clamped into the mean domain."""
    Y = _points(points)
    if len(families) != Y.shape[1]:
        raise ValueError("one family per coordinate required")
    mu = np.empty(Y.shape[1])
    for l, fam in enumerate(families):
        if not fam.expfam:
            raise TypeError(f"{fam.name} is not an exponential family")
        mu[l] = fam.clamp_mean(fam.u(Y[:, l]).mean())
    return mu


def fit_cluster(points, families: Sequence[Family], width: int) -> np.ndarray:
    """Parameters of one cluster in stored form, shape ``(d, width)``."""
    Y = _points(points)
    out = np.full((Y.shape[1], width), np.nan)
    for l, fam in enumerate(families):
        col = Y[:, l : l + 1]
        if isinstance(fam, Laplace):
            mu, sigma = laplace_fit(col)
            out[l, :2] = mu[0], sigma[0]
        elif isinstance(fam, GaussianDiagonal):
            mu, sd = gaussian_fit(col)
            out[l, :2] = mu[0], sd[0]
        elif fam.expfam:
            out[l, :1] = fam.from_mean(expfam_fit(col, [fam]))[0]
        else:
            raise TypeError(f"no estimator for {fam.name}")
    return out


def fit_all(X, z, k: int, families: Sequence[Family], previous=None) -> FitResult:
    """Fit every cluster of labelling ``z``.

    An empty cluster keeps its row from ``previous``; with no previous
    estimate it falls back to a fit on the pooled data.
    """
    X = np.asarray(X, dtype=float)
    width = max(f.n_params for f in families)
    params = np.full((k, X.shape[1], width), np.nan)
    empty = set()
    for a in range(k):
        members = X[z == a]
        if members.shape[0] == 0:
            empty.add(a)
            if previous is not None:
                params[a] = previous[a]
            else:
                params[a] = fit_cluster(X, families, width)
            continue
        params[a] = fit_cluster(members, families, width)
    return FitResult(params, empty)
