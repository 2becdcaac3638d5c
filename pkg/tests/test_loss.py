import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixclust.loss import apply_perm, brute_force_loss, confusion, loss


def test_examples():
    assert loss([0, 0, 1, 1], [1, 1, 0, 0], 2).mistakes == 0
    z = np.array([0, 2, 1, 1, 0])
    assert loss(z, z, 3).mistakes == 0
    rep = loss([0, 0, 0, 1], [0, 0, 1, 1], 2)
    assert rep.mistakes == 1 and rep.best_perm == (0, 1) and rep.rate == 0.25


def test_brute_force_examples():
    z1 = np.array([0] * 5 + [1] * 5)
    assert brute_force_loss(z1, np.zeros(10, dtype=int), 2).mistakes == 5
    assert loss(z1, np.zeros(10, dtype=int), 2).mistakes == 5
    empty = np.array([], dtype=int)
    assert brute_force_loss(empty, empty, 3).mistakes == 0
    assert loss(empty, empty, 3).mistakes == 0
    with pytest.raises(ValueError):
        brute_force_loss(empty, empty, 9)


def test_errors():
    with pytest.raises(ValueError):
        loss([0, 1], [0], 2)
    with pytest.raises(ValueError):
        loss([0, 2], [0, 1], 2)


def test_matches_brute_force_k4():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        z1, z2 = rng.integers(0, 4, 50), rng.integers(0, 4, 50)
        a, b = loss(z1, z2, 4), brute_force_loss(z1, z2, 4)
        assert a == b


def test_lexicographic_tie_break():
    # all four permutations of a symmetric confusion tie; identity is smallest
    z1 = np.array([0, 0, 1, 1])
    z2 = np.array([0, 1, 0, 1])
    assert loss(z1, z2, 2).best_perm == (0, 1)
    z1 = np.array([0, 1, 2])
    z2 = np.array([0, 0, 0])
    assert loss(z1, z2, 3).best_perm == brute_force_loss(z1, z2, 3).best_perm == (0, 1, 2)


labels = st.integers(2, 6).flatmap(
    lambda k: st.tuples(
        st.just(k),
        st.integers(0, 40).flatmap(
            lambda n: st.tuples(
                st.lists(st.integers(0, k - 1), min_size=n, max_size=n),
                st.lists(st.integers(0, k - 1), min_size=n, max_size=n),
            )
        ),
    )
)


@settings(max_examples=200, deadline=None)
@given(labels)
def test_properties(case):
    k, (z1, z2) = case
    z1, z2 = np.array(z1, dtype=int), np.array(z2, dtype=int)
    rep = loss(z1, z2, k)
    assert 0 <= rep.mistakes <= z1.size
    assert rep.mistakes == loss(z2, z1, k).mistakes
    assert rep.mistakes <= int(np.sum(z1 != z2))
    assert int(np.sum(z1 != apply_perm(z2, rep.best_perm))) == rep.mistakes
    assert rep == brute_force_loss(z1, z2, k)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 6).flatmap(lambda k: st.tuples(st.permutations(range(k)), st.lists(st.integers(0, k - 1), max_size=30))))
def test_zero_under_relabeling(case):
    perm, z = case
    z = np.array(z, dtype=int)
    assert loss(z, apply_perm(z, perm), len(perm)).mistakes == 0


def test_confusion():
    C = confusion(np.array([0, 0, 1]), np.array([1, 1, 1]), 2)
    np.testing.assert_array_equal(C, [[0, 2], [0, 1]])
