import math

import numpy as np
import pytest
from scipy.stats import norm

from mixclust.divergence import (
    chernoff_family,
    chernoff_objective,
    chernoff_pair,
    coordinate_objective,
    gaussian_chernoff_closed,
    quadrature_chernoff,
    renyi,
    snr_anisotropic,
    snr_laplace,
)
from mixclust.families import GaussianDiagonal, Laplace, NegBinomial, Poisson
from mixclust.model import MixtureSpec
from mixclust.optimize import golden_section_max

from conftest import gaussian_spec, laplace_spec, poisson_spec

# argmax of 3t + 1 - 4^t is t = log(3 / log 4) / log 4
POISSON_41_T = math.log(3.0 / math.log(4.0)) / math.log(4.0)
POISSON_41_VALUE = 3.0 * POISSON_41_T + 1.0 - 4.0**POISSON_41_T


def test_poisson_oracle_constants():
    # frozen values of the analytic optimum, cross-checked on a fine grid
    assert POISSON_41_T == pytest.approx(0.556864, abs=1e-6)
    assert POISSON_41_VALUE == pytest.approx(0.5065507, abs=1e-7)
    ts = np.arange(1, 10**6) / 10**6
    grid = 3 * ts + 1 - 4.0**ts
    assert grid.max() == pytest.approx(POISSON_41_VALUE, abs=1e-10)


def test_golden_section_on_quadratic():
    x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-15)


def test_renyi_examples():
    assert renyi(poisson_spec(4.0, 1.0), 0, 1, 0.5) * 0.5 == pytest.approx(0.5, abs=1e-12)
    assert renyi(gaussian_spec([0.0, 2.0]), 0, 1, 0.5) * 0.5 == pytest.approx(0.5, abs=1e-12)
    spec = MixtureSpec(Poisson(), np.array([[[4.0], [1.0]], [[4.0], [2.0]]]))
    # first coordinate identical, contributes nothing
    assert chernoff_objective(spec, 0, 1, 0.3) == pytest.approx(coordinate_objective(Poisson(), [1.0], [2.0], 0.3))
    with pytest.raises(ValueError):
        renyi(spec, 0, 1, 1.0)
    with pytest.raises(ValueError):
        renyi(spec, 0, 0, 0.5)


def test_poisson_objective_against_series():
    # direct summation of the product series over x = 0..200
    from scipy.special import gammaln, logsumexp

    x = np.arange(201.0)
    la = x * np.log(4.0) - 4.0 - gammaln(x + 1)
    lb = -1.0 - gammaln(x + 1)
    for t in (0.1, 0.5, 0.8):
        series = -logsumexp(t * la + (1 - t) * lb)
        assert coordinate_objective(Poisson(), [4.0], [1.0], t) == pytest.approx(series, abs=1e-12)


def test_chernoff_pair_examples():
    res = chernoff_pair(gaussian_spec([0.0, 2.0]), 0, 1)
    assert res.value == pytest.approx(0.5, abs=1e-12) and res.t_star == 0.5
    res = chernoff_pair(laplace_spec([0.0, 2.0]), 0, 1)
    assert res.value == pytest.approx(1 - math.log(2), abs=1e-12) and res.t_star == 0.5
    res = chernoff_pair(poisson_spec(4.0, 1.0), 0, 1)
    assert res.value == pytest.approx(POISSON_41_VALUE, abs=1e-12)
    assert res.t_star == pytest.approx(POISSON_41_T, abs=1e-6)


def test_identical_pair_is_zero():
    spec = MixtureSpec.unchecked(Poisson(), np.array([[[2.0]], [[2.0]], [[5.0]]]))
    res = chernoff_pair(spec, 0, 1)
    assert res.value == 0.0 and res.t_star == 0.5
    assert chernoff_family(spec).value == 0.0
    assert quadrature_chernoff(spec, 0, 1) == pytest.approx(0.0, abs=1e-10)


def test_family_minimum_pair():
    spec = poisson_spec(1.0, 4.0, 9.0)
    values = {(a, b): chernoff_pair(spec, a, b).value for a, b in [(0, 1), (0, 2), (1, 2)]}
    res = chernoff_family(spec)
    assert res.pair == (1, 2)
    assert res.value == pytest.approx(min(values.values()))
    two = poisson_spec(1.0, 5.0)
    assert chernoff_family(two).value == chernoff_pair(two, 0, 1).value


def test_symmetry_in_arguments():
    rng = np.random.default_rng(4)
    for _ in range(10):
        spec = MixtureSpec([Poisson(), NegBinomial(3.0), GaussianDiagonal()], _random_mixed(rng))
        assert chernoff_pair(spec, 0, 1).value == pytest.approx(chernoff_pair(spec, 1, 0).value, abs=1e-9)


def _random_mixed(rng):
    p = np.full((2, 3, 2), np.nan)
    p[:, 0, 0] = rng.uniform(0.5, 8, 2)
    p[:, 1, 0] = rng.uniform(0.1, 0.9, 2)
    p[:, 2, 0] = rng.normal(size=2)
    p[:, 2, 1] = rng.uniform(0.5, 2, 2)
    return p


def _random_spec(rng, kind):
    if kind == "gaussian":
        mu = rng.normal(0, 2, size=(2, 1))
        return gaussian_spec(mu, sd=rng.uniform(0.3, 3.0))
    if kind == "laplace":
        mu = rng.normal(0, 2, size=(2, 1))
        return laplace_spec(mu, scale=rng.uniform(0.3, 3.0))
    if kind == "poisson":
        return poisson_spec(*rng.uniform(0.2, 15.0, 2))
    if kind == "negbin":
        return MixtureSpec(NegBinomial(rng.uniform(1, 6)), rng.uniform(0.05, 0.8, (2, 1)))
    if kind == "gauss_unequal":
        p = np.stack([rng.normal(0, 2, (2, 1)), rng.uniform(0.5, 2.0, (2, 1))], axis=-1)
        return MixtureSpec(GaussianDiagonal(), p)


SEEDS = {"gaussian": 1, "poisson": 2, "negbin": 3, "gauss_unequal": 4}


@pytest.mark.parametrize("kind", list(SEEDS))
def test_golden_matches_grid(kind):
    rng = np.random.default_rng(SEEDS[kind])
    ts = np.arange(1, 20001) / 20001
    for _ in range(50 if kind != "gauss_unequal" else 25):
        spec = _random_spec(rng, kind)
        res = chernoff_pair(spec, 0, 1)
        grid = max(chernoff_objective(spec, 0, 1, t) for t in ts[::20])
        # refine around the coarse grid maximum
        t0 = ts[::20][int(np.argmax([chernoff_objective(spec, 0, 1, t) for t in ts[::20]]))]
        fine = np.linspace(max(t0 - 2e-3, 1e-6), min(t0 + 2e-3, 1 - 1e-6), 4001)
        grid = max(grid, max(chernoff_objective(spec, 0, 1, t) for t in fine))
        assert grid - 1e-7 <= res.value <= grid + 1e-7


def test_closed_form_equals_quadrature_extra_families():
    rng = np.random.default_rng(8)
    for kind in ("negbin", "gauss_unequal"):
        for _ in range(5):
            spec = _random_spec(rng, kind)
            assert chernoff_pair(spec, 0, 1).value == pytest.approx(quadrature_chernoff(spec, 0, 1), abs=1e-4)


def test_laplace_unequal_scale_uses_quadrature():
    spec = MixtureSpec(Laplace(), np.array([[[0.0, 1.0]], [[2.0, 3.0]]]))
    res = chernoff_pair(spec, 0, 1)
    assert res.method == "golden"
    assert res.value == pytest.approx(quadrature_chernoff(spec, 0, 1, t_grid=499), abs=1e-4)


def test_laplace_monotone_in_separation():
    values = [chernoff_pair(laplace_spec([0.0, d]), 0, 1).value for d in np.linspace(0.1, 20, 40)]
    assert np.all(np.diff(values) > 0)


def test_laplace_snr_ratio_large_separation():
    # the equal-scale closed form tends to SNR / 2, not SNR
    for D in (100.0, 150.0, 400.0):
        spec = laplace_spec(np.array([[0.0, 0.0], [D, 2 * D]]), scale=2.0)
        value = chernoff_family(spec).value
        snr = snr_laplace(spec)
        assert snr == pytest.approx(1.5 * D)
        assert value / snr < 0.5
        assert 0.9 <= 2 * value / snr <= 1.0


def test_gaussian_closed_examples():
    mu_a, mu_b = np.zeros(4), np.zeros(4)
    mu_b[0] = 2.0
    res = gaussian_chernoff_closed(mu_a, mu_b, np.eye(4), np.eye(4))
    assert res.value == pytest.approx(0.5) and res.t_star == 0.5
    assert gaussian_chernoff_closed(mu_a, mu_a, np.eye(4), np.eye(4)).value == 0.0
    res = gaussian_chernoff_closed([0.0], [0.0], [1.0], [4.0])
    spec = MixtureSpec(GaussianDiagonal(), np.array([[[0.0, 1.0]], [[0.0, 2.0]]]))
    assert res.value > 0
    assert res.value == pytest.approx(quadrature_chernoff(spec, 0, 1), abs=1e-6)
    assert res.value == pytest.approx(chernoff_pair(spec, 0, 1).value, abs=1e-10)
    with pytest.raises(ValueError):
        gaussian_chernoff_closed([0, 0], [1, 1], np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2))


def test_gaussian_closed_full_covariance_matches_snr():
    rng = np.random.default_rng(3)
    for _ in range(10):
        A = rng.normal(size=(3, 3))
        S = A @ A.T + 0.5 * np.eye(3)
        mu = rng.normal(size=(2, 3))
        res = gaussian_chernoff_closed(mu[0], mu[1], S, S)
        assert abs(res.t_star - 0.5) <= 1e-3
        assert res.value == pytest.approx(0.5 * snr_anisotropic(mu, S) ** 2, rel=1e-12)


def test_gaussian_closed_full_covariance_unequal():
    # rotate a diagonal problem: Chernoff is invariant under orthogonal maps
    rng = np.random.default_rng(5)
    Q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    Sa, Sb = np.diag([1.0, 2.0]), np.diag([3.0, 0.5])
    ma, mb = np.array([0.0, 1.0]), np.array([1.0, -1.0])
    base = gaussian_chernoff_closed(ma, mb, Sa, Sb).value
    rot = gaussian_chernoff_closed(Q @ ma, Q @ mb, Q @ Sa @ Q.T, Q @ Sb @ Q.T).value
    assert rot == pytest.approx(base, abs=1e-10)
    spec = MixtureSpec(GaussianDiagonal(), np.array([
        [[0.0, 1.0], [1.0, math.sqrt(2.0)]],
        [[1.0, math.sqrt(3.0)], [-1.0, math.sqrt(0.5)]],
    ]))
    assert base == pytest.approx(quadrature_chernoff(spec, 0, 1), abs=1e-6)


def test_bayes_error_bound():
    # Chernoff bound: Bayes error of the equal-prior test <= exp(-C) / 2
    spec = gaussian_spec([0.0, 2.0])
    bayes = norm.cdf(-1.0)
    assert bayes <= 0.5 * math.exp(-chernoff_family(spec).value)
