import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amoebakit.lopsided import (
    LopsidedInputError,
    ResultantRangeError,
    approximation_epsilon,
    cyclic_resultant,
    dominance_labels,
    is_lopsided,
    lopsided_membership,
    magnitudes_at,
)
from amoebakit.poly import build_polynomial, preset
from amoebakit.sampler import sample_amoeba
from resultant_terms import P2_TERMS, P3_TERMS, evaluate_expression, parse_expression, shifted_f0_terms


def test_is_lopsided_basic():
    assert is_lopsided([5, 1, 1])
    assert not is_lopsided([2, 1, 1])  # tie is not lopsided
    assert is_lopsided([3])


def test_is_lopsided_rejects_bad_input():
    with pytest.raises(LopsidedInputError):
        is_lopsided([])
    with pytest.raises(LopsidedInputError):
        is_lopsided([1, 0, 2])


def test_magnitudes_f0_origin():
    p = preset("f0", [1, -2, 3j, 4, 5])
    assert np.allclose(np.sort(magnitudes_at(p, (0.0, 0.0))), [1, 2, 3, 4, 5])


def test_centre_of_f0_hole():
    p = preset("f0", [1, 1, 1, 1, 6])
    assert not lopsided_membership(p, 1, (0, 0))
    assert lopsided_membership(preset("f0", [1, 1, 1, 1, 3]), 1, (0, 0))


def test_dominance_far_out():
    p = preset("f0")
    lab = dominance_labels(p, np.array([50.0, 0.0]), np.array([0.0, 0.0]))
    assert p.support[lab[0]] == (1, 0)
    assert lab[1] == p.support.index((0, 0))


def test_resultant_n1_is_identity():
    p = preset("f0", [1, 2, 3, 4, 5])
    assert cyclic_resultant(p, 1).expanded == p


def test_resultant_range():
    with pytest.raises(ResultantRangeError):
        cyclic_resultant(preset("f0"), 5)
    with pytest.raises(ResultantRangeError):
        cyclic_resultant(preset("f0"), 0)


def test_reference_term_counts():
    assert len(P2_TERMS) == 13
    assert len(P3_TERMS) == 25


def test_expression_parser():
    assert parse_expression("-2 c1^2 c2^2")[0][0] == -2
    assert list(parse_expression("c5^4 - 4 c1 c3 c5^2")[1][1]) == [1, 0, 1, 0, 2]


@pytest.mark.parametrize("n,table", [(2, P2_TERMS), (3, P3_TERMS)])
def test_reference_cyclic_resultants(n, table):
    rng = np.random.default_rng(n)
    for _ in range(20):
        c = rng.uniform(0.5, 2.0, 5) * np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
        q = cyclic_resultant(build_polynomial(shifted_f0_terms(c)), n, prune=0.0).expanded.as_dict()
        assert set(table) <= set(q)
        for key, expr in table.items():
            want, scale = evaluate_expression(expr, c)
            assert abs(q[key] - want) < 1e-8 * scale


def test_resultant_is_phase_product_pointwise():
    rng = np.random.default_rng(7)
    p = build_polynomial({(1, 0): 1.3, (0, 2): -0.4 + 1j, (-1, -1): 2.0, (0, 0): 0.7})
    z, w = 0.8 + 0.3j, -0.2 + 1.1j
    for n in (2, 3, 4):
        q = cyclic_resultant(p, n, prune=0.0).expanded
        roots = np.exp(2j * np.pi * np.arange(n) / n)
        direct = np.prod([p(a * z, b * w) for a in roots for b in roots])
        assert abs(q(z, w) - direct) < 1e-8 * abs(direct)
    assert rng is not None


def test_resultant_f0_exponents_scale():
    # every exponent of the n-th resultant is a multiple of n
    q = cyclic_resultant(preset("f0", [1, 2, 3, 4, 5]), 3).expanded
    assert all(i % 3 == 0 and j % 3 == 0 for i, j in q.support)


def test_approximation_epsilon_decreases():
    p = preset("f0")
    eps = [approximation_epsilon(p, n) for n in (1, 2, 4, 8, 64)]
    assert eps[0] == pytest.approx(math.log(16))
    assert all(a > b for a, b in zip(eps[1:], eps[2:]))


def test_epsilon_for_constant_is_infinite():
    assert approximation_epsilon(build_polynomial({(0, 0): 1}), 2) == math.inf


@given(st.lists(st.floats(0.2, 8), min_size=5, max_size=5), st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_amoeba_inside_every_lopsided_amoeba(c, seed):
    p = preset("f0", c)
    pts = sample_amoeba(p, 40, s_range=3, seed=seed).points
    for n in (1, 2, 3):
        q = cyclic_resultant(p, n).expanded
        for x in pts:
            m = magnitudes_at(q, x)
            # not lopsided, up to round-off in the dominant term
            assert m.max() <= (1 + 1e-7) * (m.sum() - m.max())


@given(st.lists(st.floats(0.1, 10), min_size=5, max_size=5), st.lists(st.floats(0, 2 * math.pi), min_size=5, max_size=5))
@settings(max_examples=50, deadline=None)
def test_phase_invariance(c, phases):
    a = preset("f0", c)
    b = preset("f0", np.array(c) * np.exp(1j * np.array(phases)))
    for x in [(0.0, 0.0), (0.5, -0.3), (2.0, 1.0)]:
        assert lopsided_membership(a, 1, x) == lopsided_membership(b, 1, x)
