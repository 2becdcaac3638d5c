"""Golden-section search for unimodal scalar functions."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` where ``x`` is the best point evaluated once the
    bracket width drops below ``tol`` (or ``max_iter`` shrinks happen).
    """
    if hi < lo:
        lo, hi = hi, lo
    a, b = lo, hi
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        it += 1
    if fc >= fd:
        return c, fc
    return d, fd
