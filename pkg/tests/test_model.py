import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixclust.families import GaussianDiagonal, Laplace, Poisson
from mixclust.model import (
    BLOCK_ROWS,
    MixtureSpec,
    check_labels,
    log_density,
    loglik_matrix,
    make_labels,
    sample_dataset,
)

from conftest import gaussian_spec, laplace_spec, poisson_spec


def test_make_labels_examples():
    z = make_labels(4, 2, 1.0, 0)
    assert sorted(np.bincount(z, minlength=2)) == [2, 2]
    z = make_labels(10, 3, 0.9, 7)
    assert np.bincount(z, minlength=3).min() >= 3
    with pytest.raises(ValueError):
        make_labels(5, 6, 1.0, 0)
    with pytest.raises(ValueError):
        make_labels(10, 2, 0.0, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 400), st.integers(2, 8), st.floats(0.05, 1.0), st.integers(0, 2**31))
def test_make_labels_balance(n, k, alpha, seed):
    floor = int(np.floor(alpha * n / k + 1e-12))
    if floor < 1:
        with pytest.raises(ValueError):
            make_labels(n, k, alpha, seed)
        return
    z = make_labels(n, k, alpha, seed)
    assert z.size == n and z.min() >= 0 and z.max() < k
    assert np.bincount(z, minlength=k).min() >= floor
    np.testing.assert_array_equal(z, make_labels(n, k, alpha, seed))


def test_spec_rejects_bad_scale_and_duplicates():
    with pytest.raises(ValueError):
        laplace_spec([0.0, 1.0], scale=0.0)
    with pytest.raises(ValueError):
        poisson_spec(2.0, 2.0)
    with pytest.raises(ValueError):
        poisson_spec(2.0, -1.0)
    with pytest.raises(ValueError):
        MixtureSpec(Poisson(), np.array([[1.0]]))


def test_mixed_families_layout():
    spec = MixtureSpec(
        [Laplace(), Poisson()],
        np.array([[[0.0, 1.0], [2.0, np.nan]], [[3.0, 1.0], [5.0, np.nan]]]),
    )
    assert spec.k == 2 and spec.d == 2
    np.testing.assert_array_equal(spec.cell(1, 1), [5.0])
    assert spec.family_name() == "laplace+poisson"
    assert not spec.expfam


def test_sample_poisson_mean():
    spec = poisson_spec(3.0, 10.0)
    z = np.zeros(1_000_000, dtype=np.int64)
    X = sample_dataset(spec, z, 2024)
    assert 2.99 <= X.mean() <= 3.01


def test_sample_deterministic():
    spec = gaussian_spec([0.0, 1.0])
    z = make_labels(10_000, 2, 1.0, 1)
    np.testing.assert_array_equal(sample_dataset(spec, z, 3), sample_dataset(spec, z, 3))
    assert not np.array_equal(sample_dataset(spec, z, 3), sample_dataset(spec, z, 4))


def test_sample_blocks_independent_of_n():
    # the first block of a longer dataset equals the dataset of a shorter one
    spec = laplace_spec([0.0, 5.0])
    z = make_labels(2 * BLOCK_ROWS + 17, 2, 1.0, 0)
    full = sample_dataset(spec, z, 11)
    part = sample_dataset(spec, z[:BLOCK_ROWS], 11)
    np.testing.assert_array_equal(full[:BLOCK_ROWS], part)


def test_sample_rejects_bad_labels():
    spec = poisson_spec(1.0, 2.0)
    with pytest.raises(ValueError):
        sample_dataset(spec, np.array([0, 2]), 0)
    with pytest.raises(ValueError):
        check_labels(np.array([0.5]), 2)


def test_log_density_examples():
    assert log_density(laplace_spec([0.0, 1.0]), 0, [0.0]) == pytest.approx(-0.693147, abs=1e-6)
    assert log_density(poisson_spec(1.0, 2.0), 0, [0.0]) == pytest.approx(-1.0)
    spec = gaussian_spec(np.array([[0.0, 0.0], [1.0, 1.0]]))
    assert log_density(spec, 0, [0.0, 0.0]) == pytest.approx(-1.837877, abs=1e-6)
    with pytest.raises(ValueError):
        log_density(spec, 2, [0.0, 0.0])


def test_loglik_matrix_sums_coordinates():
    spec = MixtureSpec(
        [GaussianDiagonal(), Poisson()],
        np.array([[[0.0, 1.0], [2.0, np.nan]], [[3.0, 2.0], [5.0, np.nan]]]),
    )
    X = np.array([[0.5, 1.0], [2.0, 7.0]])
    L = loglik_matrix(spec, X)
    for i in range(2):
        for a in range(2):
            expected = GaussianDiagonal().logpdf(X[i, 0], spec.cell(a, 0)) + Poisson().logpdf(X[i, 1], spec.cell(a, 1))
            assert L[i, a] == pytest.approx(float(expected))
