"""Renyi divergences and Chernoff information between mixture components.

Throughout, the *Chernoff objective* of a pair is

    c_ab(t) = -log  integral f_a^t f_b^(1-t)  =  (1 - t) D_t(f_a || f_b),

a concave function of t on (0, 1). Coordinates are independent, so the
objective is a sum over coordinates. Chernoff(f_a, f_b) = sup_t c_ab(t).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad_vec
from scipy.special import logsumexp

from .families import Family, GaussianDiagonal, GaussianEqualVar, Laplace
from .model import MixtureSpec
from .optimize import golden_section_max

T_LO = 1e-6
T_HI = 1.0 - 1e-6
T_TOL = 1e-9
MAX_ITER = 200


class QuadratureError(RuntimeError):
    """Numerical integration did not reach the requested accuracy."""


@dataclass(frozen=True)
class ChernoffResult:
    value: float
    t_star: float
    pair: Optional[tuple[int, int]] = None
    method: str = ""


# -- per-coordinate objectives ------------------------------------------------


def _laplace_equal_scale(loc_a, loc_b, scale, t):
    D = abs(loc_a - loc_b) / scale
    if D == 0.0:
        return 0.0
    s = 2.0 * t - 1.0
    y = s * D
    # log(expm1(y) / y), stable on both sides of 0
    if abs(y) < 1e-10:
        log_e = 0.5 * y
    elif y > 0:
        log_e = y + math.log(-math.expm1(-y)) - math.log(y)
    else:
        log_e = math.log(-math.expm1(y)) - math.log(-y)
    terms = [-(1.0 - t) * D, -t * D, -t * D + math.log(D) + log_e]
    return -(math.log(0.5) + float(logsumexp(terms)))


def _gaussian_1d(loc_a, sd_a, loc_b, sd_b, t):
    va, vb = sd_a**2, sd_b**2
    vt = (1.0 - t) * va + t * vb
    quad = 0.5 * t * (1.0 - t) * (loc_a - loc_b) ** 2 / vt
    logdet = 0.5 * (math.log(vt) - (1.0 - t) * math.log(va) - t * math.log(vb))
    return quad + logdet


def _expfam_objective(fam: Family, pa, pb, t):
    ta = float(fam.to_natural(pa))
    tb = float(fam.to_natural(pb))
    mix = t * ta + (1.0 - t) * tb
    if not fam.in_natural_domain(mix):
        raise ValueError(f"{fam.name}: natural-parameter combination leaves the domain")
    return float(t * fam.psi(ta) + (1.0 - t) * fam.psi(tb) - fam.psi(mix))


def has_closed_form(fam: Family, pa, pb) -> bool:
    if fam.expfam or isinstance(fam, GaussianDiagonal):
        return True
    if isinstance(fam, Laplace):
        return pa[1] == pb[1]
    return False


def coordinate_objective(fam: Family, pa, pb, t: float) -> float:
    """c(t) for one coordinate: closed form when available, quadrature otherwise."""
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    if np.array_equal(pa, pb):
        return 0.0
    if fam.expfam:
        return _expfam_objective(fam, pa, pb, t)
    if isinstance(fam, GaussianDiagonal):
        return _gaussian_1d(pa[0], pa[1], pb[0], pb[1], t)
    if isinstance(fam, Laplace) and pa[1] == pb[1]:
        return _laplace_equal_scale(pa[0], pb[0], pa[1], t)
    return float(coordinate_objective_quad(fam, pa, pb, np.array([t]))[0])


def coordinate_objective_quad(fam: Family, pa, pb, ts, limit: int = 2000) -> np.ndarray:
    """c(t) for one coordinate by numerical integration, vectorised over ``ts``.

    Continuous families integrate adaptively over a window of 40 standard
    deviations around the locations; discrete families sum the support until
    both tails hold less than 1e-12 mass.
    """
    ts = np.asarray(ts, dtype=float)
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    if fam.discrete:
        return _discrete_objective(fam, pa, pb, ts)
    ma, mb = float(fam.mean(pa)), float(fam.mean(pb))
    spread = 40.0 * max(float(fam.scale_hint(pa)), float(fam.scale_hint(pb)))
    lo, hi = min(ma, mb) - spread, max(ma, mb) + spread

    def integrand(x):
        return np.exp(ts * fam.logpdf(x, pa) + (1.0 - ts) * fam.logpdf(x, pb))

    points = sorted({ma, mb}) if ma != mb else [ma]
    val, err, info = quad_vec(
        integrand, lo, hi, epsabs=1e-300, epsrel=1e-12, norm="max",
        points=points, limit=limit, full_output=True,
    )
    if not info.success:
        raise QuadratureError(f"{fam.name}: integral did not converge ({info.message})")
    return -np.log(val)


def _discrete_objective(fam: Family, pa, pb, ts) -> np.ndarray:
    top = float(max(fam.mean(pa), fam.mean(pb)))
    sd = float(max(fam.scale_hint(pa), fam.scale_hint(pb)))
    xmax = int(math.ceil(top + 20.0 * sd + 20.0))
    while True:
        x = np.arange(xmax + 1, dtype=float)
        la, lb = fam.logpdf(x, pa), fam.logpdf(x, pb)
        tail_a = -math.expm1(float(logsumexp(la)))
        tail_b = -math.expm1(float(logsumexp(lb)))
        if max(tail_a, tail_b) < 1e-12:
            break
        xmax *= 2
        if xmax > 10**8:
            raise QuadratureError(f"{fam.name}: support sum did not converge")
    mixed = ts[:, None] * la[None, :] + (1.0 - ts[:, None]) * lb[None, :]
    return -logsumexp(mixed, axis=1)


# -- pair level -----------------------------------------------------------------


def _check_pair(spec: MixtureSpec, a: int, b: int):
    for c in (a, b):
        if not 0 <= c < spec.k:
            raise ValueError(f"cluster index {c} out of range for k={spec.k}")
    if a == b:
        raise ValueError("need two distinct clusters")


def chernoff_objective(spec: MixtureSpec, a: int, b: int, t: float) -> float:
    """c_ab(t) = (1 - t) D_t(f_a || f_b) summed over coordinates."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    return sum(
        coordinate_objective(fam, spec.cell(a, l), spec.cell(b, l), t)
        for l, fam in enumerate(spec.families)
    )


def renyi(spec: MixtureSpec, a: int, b: int, t: float) -> float:
    """Renyi divergence D_t(f_a || f_b) of order t in (0, 1), in nats."""
    _check_pair(spec, a, b)
    return chernoff_objective(spec, a, b, t) / (1.0 - t)


def _symmetric_coordinate(fam: Family, pa, pb) -> bool:
    # reflection symmetry makes c(t) = c(1 - t), so the sup sits at t = 1/2
    if isinstance(fam, GaussianEqualVar):
        return True
    if isinstance(fam, (Laplace, GaussianDiagonal)):
        return pa[1] == pb[1]
    return False


def chernoff_pair(spec: MixtureSpec, a: int, b: int) -> ChernoffResult:
    """Chernoff information between clusters ``a`` and ``b``."""
    _check_pair(spec, a, b)
    cells = [(fam, spec.cell(a, l), spec.cell(b, l)) for l, fam in enumerate(spec.families)]
    if all(np.array_equal(pa, pb) for _, pa, pb in cells):
        return ChernoffResult(0.0, 0.5, (a, b), "identical")
    if all(_symmetric_coordinate(*c) for c in cells):
        value = sum(coordinate_objective(fam, pa, pb, 0.5) for fam, pa, pb in cells)
        return ChernoffResult(float(value), 0.5, (a, b), "symmetric")

    def objective(t):
        return sum(coordinate_objective(fam, pa, pb, t) for fam, pa, pb in cells)

    t_star, value = golden_section_max(objective, T_LO, T_HI, T_TOL, MAX_ITER)
    return ChernoffResult(float(value), float(t_star), (a, b), "golden")


def chernoff_family(spec: MixtureSpec) -> ChernoffResult:
    """Smallest pairwise Chernoff information over all cluster pairs."""
    best = None
    for a, b in itertools.combinations(range(spec.k), 2):
        res = chernoff_pair(spec, a, b)
        if best is None or res.value < best.value:
            best = res
    return best


def quadrature_chernoff(
    spec: MixtureSpec, a: int, b: int, grid: int = 2000, t_grid: int = 1999
) -> float:
    """Brute-force Chernoff information: numerical integration per coordinate
    and a maximum over the uniform grid t = j / (t_grid + 1).

    ``grid`` bounds the number of adaptive subintervals. Test oracle only.
    """
    _check_pair(spec, a, b)
    ts = np.arange(1, t_grid + 1) / (t_grid + 1.0)
    total = np.zeros_like(ts)
    for l, fam in enumerate(spec.families):
        pa, pb = spec.cell(a, l), spec.cell(b, l)
        if np.array_equal(pa, pb):
            continue
        total += coordinate_objective_quad(fam, pa, pb, ts, limit=grid)
    return float(max(total.max(), 0.0))


def gaussian_chernoff_closed(mu_a, mu_b, cov_a, cov_b) -> ChernoffResult:
    """Chernoff information between N(mu_a, cov_a) and N(mu_b, cov_b).

    Covariances may be full matrices or vectors of variances. With
    S_t = (1 - t) cov_a + t cov_b the objective is

        t (1 - t) / 2 * dmu' S_t^-1 dmu + 1/2 log(|S_t| / (|cov_a|^(1-t) |cov_b|^t)).
    """
    mu_a = np.atleast_1d(np.asarray(mu_a, dtype=float))
    mu_b = np.atleast_1d(np.asarray(mu_b, dtype=float))
    Sa, Sb = _as_cov(cov_a, mu_a.size), _as_cov(cov_b, mu_a.size)
    delta = mu_a - mu_b
    if np.array_equal(Sa, Sb):
        if not np.any(delta):
            return ChernoffResult(0.0, 0.5, None, "identical")
        value = 0.125 * float(delta @ np.linalg.solve(Sa, delta))
        return ChernoffResult(value, 0.5, None, "symmetric")
    _, ld_a = np.linalg.slogdet(Sa)
    _, ld_b = np.linalg.slogdet(Sb)

    def objective(t):
        St = (1.0 - t) * Sa + t * Sb
        _, ld_t = np.linalg.slogdet(St)
        quad = 0.5 * t * (1.0 - t) * float(delta @ np.linalg.solve(St, delta))
        return quad + 0.5 * (ld_t - (1.0 - t) * ld_a - t * ld_b)

    t_star, value = golden_section_max(objective, T_LO, T_HI, T_TOL, MAX_ITER)
    return ChernoffResult(float(value), float(t_star), None, "golden")


def _as_cov(cov, d: int) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim <= 1:
        cov = np.diag(np.broadcast_to(cov, (d,)))
    if cov.shape != (d, d):
        raise ValueError(f"covariance must be {d}x{d}")
    if not np.allclose(cov, cov.T):
        raise ValueError("covariance must be symmetric")
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise ValueError("covariance must be positive definite") from None
    return cov


# -- signal-to-noise ratios ----------------------------------------------------------


def snr_laplace(spec: MixtureSpec) -> float:
    """min over pairs of sum_l |mu_al - mu_bl| / sigma_l (equal-scale Laplace)."""
    locs = spec.params[:, :, 0]
    scales = spec.params[:, :, 1]
    return min(
        float(np.sum(np.abs(locs[a] - locs[b]) / scales[a]))
        for a, b in itertools.combinations(range(spec.k), 2)
    )


def snr_anisotropic(mu, cov) -> float:
    """(1/2) min over pairs of the Mahalanobis distance between centres."""
    mu = np.asarray(mu, dtype=float)
    S = _as_cov(cov, mu.shape[1])
    return min(
        0.5 * math.sqrt(float((mu[a] - mu[b]) @ np.linalg.solve(S, mu[a] - mu[b])))
        for a, b in itertools.combinations(range(mu.shape[0]), 2)
    )
