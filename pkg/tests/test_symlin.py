import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sggmm.errors import InvalidInput, NotPositiveDefinite
from sggmm.simulate import chain_precision
from sggmm.symlin import as_sym, cholesky, inverse, is_pd, log_det

from oracles import cofactor_det


def test_cholesky_identity():
    np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))


def test_cholesky_2x2():
    L = cholesky([[4.0, 2.0], [2.0, 3.0]])
    np.testing.assert_allclose(L, [[2.0, 0.0], [1.0, math.sqrt(2.0)]], atol=1e-15)


def test_cholesky_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky([[1.0, 2.0], [2.0, 1.0]])


def test_cholesky_tiny_pivot_rejected():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, 1e-13]))


def test_log_det_examples():
    assert log_det(np.eye(5)) == 0.0
    assert log_det(np.diag([2.0, 3.0])) == pytest.approx(math.log(6.0), abs=1e-14)


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
def test_log_det_chain_against_cofactor(p):
    theta = chain_precision(p, 1)
    assert log_det(theta) == pytest.approx(math.log(cofactor_det(theta)), abs=1e-12)


def test_inverse_examples():
    np.testing.assert_allclose(inverse(np.eye(4)), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-15)
    np.testing.assert_allclose(inverse([[2.0, 1.0], [1.0, 2.0]]),
                               np.array([[2.0, -1.0], [-1.0, 2.0]]) / 3.0, atol=1e-15)


def test_inverse_rejects_non_pd():
    with pytest.raises(NotPositiveDefinite):
        inverse([[0.0, 1.0], [1.0, 0.0]])


def test_as_sym_mirrors_lower_triangle():
    a = as_sym([[1.0, 99.0], [2.0, 3.0]])
    np.testing.assert_array_equal(a, [[1.0, 2.0], [2.0, 3.0]])
    with pytest.raises(InvalidInput):
        as_sym(np.ones((2, 3)))
    with pytest.raises(InvalidInput):
        as_sym([[np.nan]])


@st.composite
def spd_matrices(draw):
    p = draw(st.integers(1, 8))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    a = r.standard_normal((p, p))
    return a @ a.T + p * np.eye(p) * 0.1 + np.eye(p) * 0.1


@settings(max_examples=60, deadline=None)
@given(spd_matrices())
def test_linalg_properties(a):
    L = cholesky(a)
    assert np.abs(L @ L.T - a).max() <= 1e-10 * max(1.0, np.abs(a).max())
    inv = inverse(a)
    assert log_det(inv) == pytest.approx(-log_det(a), abs=1e-8)
    np.testing.assert_allclose(inverse(inv), a, atol=1e-8 * max(1.0, np.abs(a).max()))
    assert np.abs(a @ inv - np.eye(len(a))).max() <= 1e-10 * np.linalg.cond(a)
    assert is_pd(a)
