import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amoebakit.persistence import (
    TooFewPointsError,
    connectivity_report,
    dominant_h1,
    farthest_point_subsample,
    noise_floor,
    rips_persistence,
)

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def naive_diagram(points, max_radius=math.inf):
    """Standard column reduction of the full Rips boundary matrix (dims 0..2) over Z/2."""
    n = len(points)
    d = np.linalg.norm(points[:, None] - points[None, :], axis=2) / 2
    simplices = [((i,), 0.0) for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        simplices.append(((i, j), d[i, j]))
    for tri in itertools.combinations(range(n), 3):
        r = max(d[a, b] for a, b in itertools.combinations(tri, 2))
        simplices.append((tri, r))
    simplices = [s for s in simplices if s[1] <= max_radius]
    simplices.sort(key=lambda s: (s[1], len(s[0]), s[0]))
    index = {s: k for k, (s, _) in enumerate(simplices)}
    cols = []
    for s, _ in simplices:
        faces = [index[f] for f in itertools.combinations(s, len(s) - 1)] if len(s) > 1 else []
        cols.append(set(faces))
    low_of = {}
    pairs = []
    paired = set()
    for k, col in enumerate(cols):
        while col:
            low = max(col)
            if low not in low_of:
                low_of[low] = k
                pairs.append((low, k))
                paired.update((low, k))
                break
            col ^= cols[low_of[low]]
    out = []
    for a, b in pairs:
        dim = len(simplices[a][0]) - 1
        if simplices[b][1] > simplices[a][1]:
            out.append((dim, simplices[a][1], simplices[b][1]))
    for k, (s, r) in enumerate(simplices):
        if k not in paired and len(s) <= 2 and not cols[k]:
            out.append((len(s) - 1, r, math.inf))
    return sorted(out)


def _diagram(points, max_radius=math.inf):
    dg = rips_persistence(points, max_radius=max_radius, max_points=100)
    return sorted((k, b, e) for k, b, e in dg.features if e > b)


def test_unit_square():
    dg = rips_persistence(SQUARE)
    h1 = dg.dim(1)
    assert h1.shape == (1, 2)
    birth, death = h1[0]
    assert birth == pytest.approx(0.5)
    assert death / birth == pytest.approx(math.sqrt(2), abs=1e-8)
    assert len(dg.dim(0)) == 4 and np.isinf(dg.dim(0)[:, 1]).sum() == 1


def test_square_matches_oracle():
    assert _diagram(SQUARE) == naive_diagram(SQUARE)


@given(st.integers(4, 8), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_matches_naive_oracle(n, seed):
    pts = np.random.default_rng(seed).uniform(-1, 1, (n, 2))
    ours = _diagram(pts)
    ref = naive_diagram(pts)
    assert len(ours) == len(ref)
    for a, b in zip(ours, ref):
        assert a[0] == b[0]
        assert a[1] == pytest.approx(b[1], abs=1e-12)
        assert a[2] == pytest.approx(b[2], abs=1e-12) or (math.isinf(a[2]) and math.isinf(b[2]))


@given(st.integers(5, 8), st.integers(0, 10_000), st.floats(0.2, 1.0))
@settings(max_examples=40, deadline=None)
def test_truncated_matches_naive_oracle(n, seed, radius):
    pts = np.random.default_rng(seed).uniform(-1, 1, (n, 2))
    ours = [f for f in _diagram(pts, radius) if f[0] == 1]
    ref = [f for f in naive_diagram(pts, radius) if f[0] == 1]
    assert ours == pytest.approx(ref) if ref else ours == []


def test_circle_has_one_loop():
    t = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    pts = np.column_stack([np.cos(t), np.sin(t)])
    dg = rips_persistence(pts)
    top, second = dominant_h1(dg)
    assert top > 0.7 and second < 0.05


def test_too_few_points():
    with pytest.raises(TooFewPointsError):
        rips_persistence(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]))


def test_window_filter():
    pts = np.vstack([SQUARE, [[100.0, 100.0]]])
    assert rips_persistence(pts, window=10.0).point_count == 4


def test_farthest_point_subsample():
    pts = np.random.default_rng(0).uniform(size=(200, 2))
    idx = farthest_point_subsample(pts, 20, seed=1)
    assert len(idx) == 20 and len(set(idx.tolist())) == 20
    assert np.array_equal(idx, farthest_point_subsample(pts, 20, seed=1))
    assert len(farthest_point_subsample(pts, 500)) == 200


def test_connectivity_and_noise_floor():
    pts = np.vstack([SQUARE, SQUARE + 10])
    dg = rips_persistence(pts)
    assert noise_floor(dg) == pytest.approx(np.sqrt(81 + 81) / 2)
    rep = connectivity_report(dg, 1.0)
    assert not rep.connected and rep.components_above == 2
    assert connectivity_report(dg, 100.0).connected
    assert rep.component_counts[0] == 8
