import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.distance import pdist, squareform

from amoebakit.projections import (
    AsymmetricMatrixError,
    DisconnectedGraphError,
    classical_mds,
    euclidean_distances,
    isomap,
    pca,
    project,
    spectral_embedding,
    symmetric_eigen,
)


@given(st.integers(1, 30), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_jacobi_matches_lapack(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    A = a + a.T
    vals, vecs = symmetric_eigen(A)
    ref = np.sort(np.linalg.eigvalsh(A))[::-1]
    assert np.allclose(vals, ref, atol=1e-9 * max(1, np.abs(ref).max()))
    assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-9)
    assert np.allclose(A @ vecs, vecs * vals, atol=1e-8 * max(1, np.abs(ref).max()))


def test_large_matrix_uses_lapack_path():
    a = np.random.default_rng(0).normal(size=(80, 80))
    vals, _ = symmetric_eigen(a @ a.T)
    assert np.all(np.diff(vals) <= 0)


def test_asymmetric_rejected():
    with pytest.raises(AsymmetricMatrixError):
        symmetric_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(AsymmetricMatrixError):
        symmetric_eigen(np.zeros((2, 3)))


def test_pca_line():
    t = np.linspace(-1, 1, 50)
    X = np.column_stack([t, 2 * t, -t]) + 5
    emb = pca(X, 1)
    assert emb.params["explained_variance_ratio"][0] == pytest.approx(1.0)
    assert np.allclose(np.abs(emb.coords[:, 0]), np.abs(t) * np.sqrt(6))


def test_pca_dims_bounds():
    with pytest.raises(ValueError):
        pca(np.zeros((3, 2)), 3)


def test_pca_deterministic_signs():
    X = np.random.default_rng(4).normal(size=(30, 4))
    a = pca(X, 2).coords
    b = pca(X.copy(), 2).coords
    assert np.array_equal(a, b)


def test_mds_recovers_planar_distances():
    X = np.random.default_rng(1).normal(size=(25, 2))
    emb = classical_mds(euclidean_distances(X), 2)
    assert np.allclose(pdist(emb.coords), pdist(X), atol=1e-8)
    assert emb.params["flags"] == []


def test_mds_non_euclidean_flag():
    # four points with one violated triangle inequality
    D = np.array([[0, 1, 1, 5], [1, 0, 1, 1], [1, 1, 0, 1], [5, 1, 1, 0]], dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        emb = classical_mds(D, 3)
    assert "negative-eigenvalues" in emb.params["flags"]


def test_mds_input_checks():
    with pytest.raises(AsymmetricMatrixError):
        classical_mds(np.array([[0, 1.0], [2.0, 0]]), 1)
    with pytest.raises(ValueError):
        classical_mds(np.array([[1.0, 0], [0, 0]]), 1)


def test_isomap_unrolls_arc():
    t = np.linspace(0, 1.5 * np.pi, 60)
    X = np.column_stack([np.cos(t), np.sin(t)])
    emb = isomap(X, 4, 1)
    # geodesic coordinate is monotone in the arc parameter
    c = emb.coords[:, 0]
    assert np.all(np.diff(c) > 0) or np.all(np.diff(c) < 0)
    assert abs(c.max() - c.min()) == pytest.approx(1.5 * np.pi, rel=0.01)


def test_disconnected_graph():
    X = np.vstack([np.zeros((5, 2)) + np.arange(5)[:, None] * 0.1, np.full((5, 2), 100.0) + np.arange(5)[:, None] * 0.1])
    with pytest.raises(DisconnectedGraphError) as info:
        isomap(X, 2, 1)
    assert sorted(info.value.sizes) == [5, 5]
    with pytest.raises(DisconnectedGraphError):
        spectral_embedding(X, 2, 1)


def test_spectral_two_clusters():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(size=(20, 2)), rng.normal(size=(20, 2)) + [6, 0]])
    # bridge the clusters so the graph is connected
    X = np.vstack([X, np.column_stack([np.linspace(1, 5, 9), np.zeros(9)])])
    emb = spectral_embedding(X, 5, 1)
    f = emb.coords[:, 0]
    assert np.sign(f[:20]).std() == 0 and np.sign(f[20:40]).std() == 0
    assert np.sign(f[0]) != np.sign(f[20])
    assert emb.params["eigenvalues"][0] > 0


def test_k_too_small():
    with pytest.raises(ValueError):
        isomap(np.zeros((5, 2)), 1, 1)


def test_project_dispatch():
    X = np.random.default_rng(2).normal(size=(30, 3))
    for method in ("pca", "mds", "isomap", "spectral"):
        assert project(method, X, 2, k=8).coords.shape == (30, 2)
    with pytest.raises(ValueError):
        project("tsne", X, 2)


def test_mds_equals_pca_on_euclidean():
    X = np.random.default_rng(5).normal(size=(20, 3))
    a = pca(X, 2).coords
    b = classical_mds(squareform(pdist(X)), 2).coords
    assert np.allclose(np.abs(a), np.abs(b), atol=1e-8)


def test_isomap_complete_graph_equals_mds():
    X = np.random.default_rng(6).normal(size=(15, 3))
    a = isomap(X, 14, 2).coords
    b = classical_mds(euclidean_distances(X), 2).coords
    assert np.allclose(a, b, atol=1e-8)


def _f0_embedding():
    from amoebakit.ml.datasets import gen_coeff_dataset

    ds = gen_coeff_dataset("f0", 600, coeff_domain="real", seed=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        emb = classical_mds(euclidean_distances(ds.inputs), 2).coords
    return ds.inputs, ds.labels.ravel(), emb


def test_mds_f0_classes_separate():
    _, y, emb = _f0_embedding()
    # the classes sit in a V around the c5 axis, so the linear fit uses |coords|
    A = np.column_stack([np.abs(emb), np.ones(len(emb))])
    w = np.linalg.lstsq(A, 2.0 * y - 1, rcond=None)[0]
    assert np.mean((A @ w > 0) == y) >= 0.85


def test_mds_f0_axes():
    c, _, emb = _f0_embedding()
    assert abs(np.corrcoef(np.abs(emb[:, 0]), np.abs(c[:, 4]))[0, 1]) > 0.95
    s = np.sqrt(np.abs(c[:, 0] * c[:, 2])) + np.sqrt(np.abs(c[:, 1] * c[:, 3]))
    # classical MDS is linear, so |dim2| only partly follows the threshold term (r = 0.31 here)
    assert np.corrcoef(np.abs(emb[:, 1]), s)[0, 1] > 0.25


def test_pca_isotropic_ratios():
    X = np.random.default_rng(7).normal(size=(5000, 3))
    ratios = pca(X, 3).params["explained_variance_ratio"]
    assert np.allclose(ratios, 1 / 3, atol=0.1)
    assert np.all(np.diff(ratios) <= 0)
