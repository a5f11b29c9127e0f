import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amoebakit.roots import RootFindingError, batch_roots, relative_residual, solve_univariate_roots


def test_quadratic():
    r = np.sort_complex(solve_univariate_roots([1, -3, 2]))
    assert np.allclose(r, [1, 2])


def test_trailing_zeros_give_zero_roots():
    r = solve_univariate_roots([1, -1, 0, 0])
    assert np.sum(r == 0) == 2
    assert np.any(np.isclose(r, 1))


def test_degree_zero_rejected():
    with pytest.raises(ValueError):
        solve_univariate_roots([0, 3])


def test_batch_matches_numpy():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(20, 7)) + 1j * rng.normal(size=(20, 7))
    roots, ok = batch_roots(a)
    assert ok.all()
    for row, r in zip(a, roots):
        ref = np.roots(row)
        # every reference root has a match
        assert np.max(np.min(np.abs(ref[:, None] - r[None, :]), axis=1)) < 1e-8


def test_failure_reports_best():
    with pytest.raises(RootFindingError) as info:
        solve_univariate_roots([1, 0, 0, 0, 0, 0, -1e-300], max_iter=1)
    assert info.value.best is not None


@given(st.lists(st.tuples(st.floats(0.1, 3), st.floats(0, 2 * np.pi)), min_size=1, max_size=6))
@settings(max_examples=100, deadline=None)
def test_roots_of_constructed_polynomial(polar):
    rs = [m * np.exp(1j * t) for m, t in polar]
    coeffs = np.poly(np.array(rs, dtype=complex))
    r = solve_univariate_roots(coeffs)
    assert np.all(relative_residual(coeffs, r) < 1e-8)
