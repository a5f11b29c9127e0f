import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amoebakit.poly import (
    InvalidPolynomialError,
    InvalidTransformError,
    PolyDomainError,
    UnimodularTransform,
    build_polynomial,
    coefficient_vector,
    convex_hull,
    evaluate,
    format_poly_text,
    log_map,
    max_genus,
    multiply,
    newton_polytope,
    parse_matrix,
    parse_poly_text,
    preset,
    transform,
)


def test_terms_sorted_and_merged():
    p = build_polynomial([((1, 0), 2), ((0, 0), 1), ((1, 0), 3)])
    assert p.support == [(0, 0), (1, 0)]
    assert p.coefficients[1] == 5


def test_zero_polynomial_rejected():
    with pytest.raises(InvalidPolynomialError):
        build_polynomial({(0, 0): 0})


def test_evaluate_f0():
    p = preset("f0", [1, 1, 1, 1, 5])
    # z = w = 1 gives 1 + 1 + 1 + 1 + 5
    assert evaluate(p, 1, 1) == pytest.approx(9)
    assert evaluate(p, -1, -1) == pytest.approx(1)


def test_negative_exponent_at_zero():
    with pytest.raises(PolyDomainError):
        evaluate(preset("f0"), 0, 1)
    with pytest.raises(PolyDomainError):
        log_map(0, 1)


def test_multiply_matches_pointwise():
    p = preset("f0", [1, 2, 3, 4, 5])
    q = build_polynomial({(2, 1): 1 - 1j, (0, -3): 2})
    z, w = 0.7 + 0.2j, -1.3 + 0.5j
    assert multiply(p, q)(z, w) == pytest.approx(p(z, w) * q(z, w))


def test_newton_polytope_f0():
    poly = newton_polytope(preset("f0"))
    assert sorted(poly.vertices) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert poly.interior_points == ((0, 0),)
    assert len(poly.lattice_points) == 5


def test_max_genus_presets():
    assert max_genus(preset("f0")) == 1
    assert max_genus(preset("l332")) == 2
    assert max_genus(preset("cz2z4")) == 3
    assert max_genus(preset("k4532")) == 4


def test_single_monomial_hull():
    poly = newton_polytope(build_polynomial({(2, 3): 1}))
    assert poly.vertices == ((2, 3),)
    assert poly.interior_points == ()


def test_collinear_hull_has_no_interior():
    poly = newton_polytope(build_polynomial({(0, 0): 1, (2, 2): 1, (4, 4): 1}))
    assert len(poly.lattice_points) == 5
    assert poly.interior_points == ()


def _pick_count(hull):
    # shoelace area and Pick's theorem: A = I + B/2 - 1
    x = np.array([v[0] for v in hull], dtype=float)
    y = np.array([v[1] for v in hull], dtype=float)
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=12))
@settings(max_examples=200, deadline=None)
def test_pick_theorem(points):
    hull = convex_hull(points)
    if len(hull) < 3:
        return
    poly = newton_polytope(build_polynomial({p: 1 for p in points}))
    area = _pick_count(hull)
    boundary = len(poly.lattice_points) - len(poly.interior_points)
    assert area == pytest.approx(len(poly.interior_points) + boundary / 2 - 1)


def test_transform_substitution_identity():
    p = preset("f0", [1, 2, 3, 4, 5])
    t = UnimodularTransform(((1, 1), (0, 1)), (2.0, -0.5j))
    q = transform(p, t)
    z, w = 0.3 + 0.9j, 1.1 - 0.4j
    assert q(z, w) == pytest.approx(p(*t.substitute(z, w)))


def test_transform_singular_rejected():
    with pytest.raises(InvalidTransformError):
        UnimodularTransform(((1, 2), (2, 4)))
    with pytest.raises(InvalidTransformError):
        UnimodularTransform(((1, 0), (0, 1)), (0, 1))


def test_parse_matrix():
    assert parse_matrix("1,1;0,1") == ((1, 1), (0, 1))
    with pytest.raises(InvalidTransformError):
        parse_matrix("1,2,3")


def test_text_round_trip():
    p = build_polynomial({(1, 0): 1 + 2j, (-2, 3): -0.1, (0, 0): 7})
    assert parse_poly_text(format_poly_text(p)) == p


def test_parse_text_errors():
    with pytest.raises(InvalidPolynomialError):
        parse_poly_text("1 0\n")
    with pytest.raises(InvalidPolynomialError):
        parse_poly_text("a b 1\n")


def test_preset_coefficient_vector():
    c = [1, -2, 3, 4j, 5, 6]
    assert np.allclose(coefficient_vector("l332", preset("l332", c)), c)
    with pytest.raises(InvalidPolynomialError):
        preset("f0", [1, 2])
