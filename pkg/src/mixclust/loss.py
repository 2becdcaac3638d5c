"""Misclustering loss: Hamming distance minimised over relabelings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import check_labels

BRUTE_FORCE_MAX_K = 8


@dataclass(frozen=True)
class LossReport:
    mistakes: int
    rate: float
    # best_perm[b] is the label of z1 matched to label b of z2
    best_perm: tuple


def confusion(z1, z2, k: int) -> np.ndarray:
    """C[a, b] = #{i : z1_i = a, z2_i = b}."""
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (z1, z2), 1)
    return C


def _prepare(z1, z2, k):
    z1 = np.asarray(z1)
    z2 = np.asarray(z2)
    if z1.shape != z2.shape:
        raise ValueError(f"label vectors differ in length ({z1.size} vs {z2.size})")
    return check_labels(z1, k), check_labels(z2, k)


def _agreement(C, perm) -> int:
    return int(sum(C[perm[b], b] for b in range(len(perm))))


def loss(z1, z2, k: int) -> LossReport:
    """min over permutations tau of Ham(z1, tau o z2), via optimal assignment.

    Among optimal permutations the lexicographically smallest is reported.
    """
    z1, z2 = _prepare(z1, z2, k)
    n = z1.size
    C = confusion(z1, z2, k)
    # W[b, a]: agreements when label b of z2 maps to label a of z1
    W = C.T
    rows, cols = linear_sum_assignment(W, maximize=True)
    best = int(W[rows, cols].sum())
    perm = _lex_smallest(W, best)
    return LossReport(n - best, (n - best) / n if n else 0.0, perm)


def _lex_smallest(W: np.ndarray, target: int) -> tuple:
    """Fix tau(0), tau(1), ... greedily to the smallest value that keeps the optimum."""
    k = W.shape[0]
    fixed: list[int] = []
    gained = 0
    for b in range(k):
        free_rows = list(range(b + 1, k))
        for a in range(k):
            if a in fixed:
                continue
            remaining_cols = [c for c in range(k) if c not in fixed and c != a]
            rest = 0
            if free_rows:
                sub = W[np.ix_(free_rows, remaining_cols)]
                r, c = linear_sum_assignment(sub, maximize=True)
                rest = int(sub[r, c].sum())
            if gained + W[b, a] + rest == target:
                fixed.append(a)
                gained += int(W[b, a])
                break
    return tuple(fixed)


def brute_force_loss(z1, z2, k: int) -> LossReport:
    """Exact loss by enumerating all k! permutations (k <= 8)."""
    if k > BRUTE_FORCE_MAX_K:
        raise ValueError(f"brute force limited to k <= {BRUTE_FORCE_MAX_K}")
    z1, z2 = _prepare(z1, z2, k)
    n = z1.size
    C = confusion(z1, z2, k)
    best, best_perm = -1, None
    for perm in itertools.permutations(range(k)):  # lexicographic order
        agree = _agreement(C, perm)
        if agree > best:
            best, best_perm = agree, perm
    return LossReport(n - best, (n - best) / n if n else 0.0, tuple(best_perm))


def apply_perm(z, perm) -> np.ndarray:
    """Relabel ``z`` so that label b becomes ``perm[b]``."""
    return np.asarray(perm, dtype=np.int64)[np.asarray(z, dtype=np.int64)]
