"""Linear and graph-based embeddings: PCA, classical MDS, Isomap, Laplacian eigenmaps."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

JACOBI_MAX_N = 60


class AsymmetricMatrixError(ValueError):
    pass


class DisconnectedGraphError(ValueError):
    def __init__(self, sizes):
        super().__init__(f"neighbour graph has {len(sizes)} components of sizes {sorted(sizes, reverse=True)}")
        self.sizes = sizes


@dataclass
class Embedding:
    coords: np.ndarray
    method: str
    params: dict = field(default_factory=dict)


def _jacobi(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvectors as columns)."""
    A = A.copy()
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(2 * np.sum(np.triu(A, 1) ** 2))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                if theta == 0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                # rotate rows/cols p and q
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V


def symmetric_eigen(A, tol: float = 1e-10):
    """Eigenvalues in descending order and orthonormal eigenvectors (columns).

    Small matrices use cyclic Jacobi rotations; larger ones go to LAPACK.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise AsymmetricMatrixError("matrix must be square")
    if np.max(np.abs(A - A.T), initial=0.0) > tol * max(1.0, np.max(np.abs(A), initial=0.0)):
        raise AsymmetricMatrixError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    if A.shape[0] <= JACOBI_MAX_N:
        vals, vecs = _jacobi(A)
    else:
        vals, vecs = np.linalg.eigh(A)
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1
    return vecs * signs


def pca(data, dims: int) -> Embedding:
    X = np.asarray(data, dtype=float)
    n, d = X.shape
    if dims < 1 or dims > min(n - 1, d):
        raise ValueError(f"dims must be in [1, {min(n - 1, d)}]")
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / (n - 1)
    vals, vecs = symmetric_eigen(cov)
    vecs = _fix_signs(vecs[:, :dims])
    total = vals.clip(min=0).sum()
    ratio = vals[:dims].clip(min=0) / total if total > 0 else np.zeros(dims)
    return Embedding(
        Xc @ vecs,
        "pca",
        {"components": vecs.T, "explained_variance": vals[:dims], "explained_variance_ratio": ratio},
    )


def classical_mds(distances, dims: int) -> Embedding:
    """Torgerson scaling of a distance matrix."""
    D = np.asarray(distances, dtype=float)
    n = D.shape[0]
    if D.shape != (n, n) or np.any(D < 0) or np.any(np.diag(D) != 0):
        raise ValueError("distances must be square, nonnegative with zero diagonal")
    if not np.allclose(D, D.T, atol=1e-10):
        raise AsymmetricMatrixError("distance matrix is not symmetric")
    if dims < 1 or dims > n:
        raise ValueError("bad dims")
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D**2) @ J
    vals, vecs = symmetric_eigen(B, tol=1e-8)
    # any clearly negative eigenvalue means no Euclidean configuration exists
    neg = vals < -1e-9 * max(1.0, abs(vals[0]))
    flags = []
    if np.any(neg):
        flags.append("negative-eigenvalues")
        warnings.warn("distance matrix is not Euclidean; negative eigenvalues dropped", RuntimeWarning)
    vecs = _fix_signs(vecs[:, :dims])
    coords = vecs * np.sqrt(vals[:dims].clip(min=0))
    return Embedding(coords, "mds", {"eigenvalues": vals[:dims], "flags": flags})


def knn_graph(X: np.ndarray, k: int) -> csr_matrix:
    """Symmetric k-nearest-neighbour graph with Euclidean edge weights."""
    n = len(X)
    if k < 2 and n > 2:
        raise ValueError("k must be >= 2")
    k = min(k, n - 1)
    dist, idx = cKDTree(X).query(X, k=k + 1)
    rows = np.repeat(np.arange(n), k)
    G = csr_matrix((dist[:, 1:].ravel(), (rows, idx[:, 1:].ravel())), shape=(n, n))
    return G.maximum(G.T)


def _require_connected(G):
    count, labels = connected_components(G, directed=False)
    if count > 1:
        raise DisconnectedGraphError(np.bincount(labels).tolist())


def isomap(data, k_neighbors: int, dims: int) -> Embedding:
    X = np.asarray(data, dtype=float)
    if k_neighbors < 2:
        raise ValueError("k must be >= 2")
    G = knn_graph(X, k_neighbors)
    _require_connected(G)
    geo = shortest_path(G, method="D", directed=False)
    emb = classical_mds(0.5 * (geo + geo.T), dims)
    return Embedding(emb.coords, "isomap", {"k": k_neighbors, **emb.params})


def spectral_embedding(data, k_neighbors: int, dims: int) -> Embedding:
    """Eigenvectors of L = D - A for the smallest nonzero eigenvalues (0/1 adjacency)."""
    X = np.asarray(data, dtype=float)
    if k_neighbors < 2:
        raise ValueError("k must be >= 2")
    G = knn_graph(X, k_neighbors)
    _require_connected(G)
    A = (G > 0).astype(float).toarray()
    L = np.diag(A.sum(axis=1)) - A
    vals, vecs = symmetric_eigen(L)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    coords = _fix_signs(vecs[:, 1 : dims + 1])
    return Embedding(coords, "spectral", {"k": k_neighbors, "eigenvalues": vals[1 : dims + 1]})


def euclidean_distances(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return cdist(X, X)


def project(method: str, data, dims: int, k: int = 10) -> Embedding:
    if method == "pca":
        return pca(data, dims)
    if method == "mds":
        return classical_mds(euclidean_distances(data), dims)
    if method == "isomap":
        return isomap(data, k, dims)
    if method == "spectral":
        return spectral_embedding(data, k, dims)
    raise ValueError(f"unknown method {method!r}")
