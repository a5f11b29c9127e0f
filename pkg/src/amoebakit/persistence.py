"""Vietoris-Rips persistence in degrees 0 and 1 over Z/2.

Radii follow the disc picture: an edge enters at r = d/2 (the two discs of
radius r touch) and a triangle enters with its longest edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform


class TooFewPointsError(ValueError):
    pass


@dataclass
class PersistenceDiagram:
    features: list[tuple[int, float, float]]  # (dim, birth, death); death may be inf
    point_count: int
    max_radius: float
    meta: dict = field(default_factory=dict)

    def dim(self, d: int) -> np.ndarray:
        """(k, 2) array of (birth, death) in degree d."""
        rows = [(b, e) for k, b, e in self.features if k == d]
        return np.array(rows, dtype=float).reshape(-1, 2)

    def persistence(self, d: int) -> np.ndarray:
        a = self.dim(d)
        return a[:, 1] - a[:, 0]


def farthest_point_subsample(points: np.ndarray, m: int, seed: int = 0) -> np.ndarray:
    """Indices of m points chosen greedily by largest distance to the chosen set."""
    n = len(points)
    if m >= n:
        return np.arange(n)
    rng = np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), 0x7470]))
    chosen = [int(rng.integers(n))]
    d = np.linalg.norm(points - points[chosen[0]], axis=1)
    for _ in range(m - 1):
        i = int(np.argmax(d))
        chosen.append(i)
        d = np.minimum(d, np.linalg.norm(points - points[i], axis=1))
    return np.array(sorted(chosen))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a


def _h0(n, order, iu, ju, radii):
    """Degree-0 pairs and the set of edge ranks that merge components."""
    uf = _UnionFind(n)
    deaths = []
    negative = set()
    for rank, e in enumerate(order):
        a, b = uf.find(iu[e]), uf.find(ju[e])
        if a != b:
            uf.parent[max(a, b)] = min(a, b)
            deaths.append(radii[e])
            negative.add(rank)
            if len(deaths) == n - 1:
                break
    return deaths, negative


def _h1(n, order, iu, ju, radii, limit, negative):
    """Degree-1 pairs by reducing the coboundary matrix with columns in reverse filtration order.

    Triangles are keyed by rank(longest edge) * n + (vertex opposite to it),
    which is a total order compatible with the filtration. Edges that kill a
    degree-0 class never start a degree-1 class and are skipped (clearing).
    """
    m = int(np.searchsorted(radii[order], limit, side="right"))
    rank = np.full((n, n), -1, dtype=np.int64)
    rank[iu[order[:m]], ju[order[:m]]] = np.arange(m)
    rank[ju[order[:m]], iu[order[:m]]] = np.arange(m)
    verts = np.arange(n)
    pivots: dict[int, np.ndarray] = {}
    pairs = []
    essential = []

    def coboundary(r):
        a, b = iu[order[r]], ju[order[r]]
        ra, rb = rank[a], rank[b]
        ok = (ra >= 0) & (rb >= 0) & (verts != a) & (verts != b)
        ra, rb, v = ra[ok], rb[ok], verts[ok]
        top = np.maximum(np.maximum(ra, rb), r)
        # the vertex opposite the longest edge
        opp = np.where(top == r, v, np.where(top == ra, b, a))
        return np.sort(top * n + opp)

    for r in range(m - 1, -1, -1):
        if r in negative:
            continue
        col = coboundary(r)
        while col.size:
            piv = int(col[0])
            other = pivots.get(piv)
            if other is None:
                break
            col = np.setxor1d(col, other, assume_unique=True)
        if col.size:
            piv = int(col[0])
            pivots[piv] = col
            birth = radii[order[r]]
            death = radii[order[piv // n]]
            if death > birth:
                pairs.append((birth, death))
        else:
            essential.append(radii[order[r]])
    return pairs, essential


def rips_persistence(points, max_radius: float = math.inf, max_points: int = 300, seed: int = 0, window=None) -> PersistenceDiagram:
    """Persistence diagram (degrees 0 and 1) of the Rips filtration up to ``max_radius``.

    Points outside ``window`` (a half-width or (x0, x1, y0, y1)) are dropped
    first; clouds larger than ``max_points`` are thinned by farthest-point
    sampling. Degree-0 deaths use every edge, so exactly one class is infinite.
    """
    pts = np.asarray(getattr(points, "points", points), dtype=float).reshape(-1, 2)
    if window is not None:
        x0, x1, y0, y1 = (-window, window, -window, window) if np.isscalar(window) else window
        keep = (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
        pts = pts[keep]
    pts = np.unique(pts, axis=0)
    if len(pts) < 3:
        raise TooFewPointsError(f"need at least 3 distinct points, got {len(pts)}")
    pts = pts[farthest_point_subsample(pts, max_points, seed)]
    n = len(pts)
    d = pdist(pts)
    radii = d / 2
    iu, ju = np.triu_indices(n, 1)
    order = np.lexsort((np.arange(len(d)), radii))
    deaths, negative = _h0(n, order, iu, ju, radii)
    feats = [(0, 0.0, float(x)) for x in deaths] + [(0, 0.0, math.inf)]
    pairs, essential = _h1(n, order, iu, ju, radii, max_radius, negative)
    feats += [(1, float(b), float(e)) for b, e in pairs]
    feats += [(1, float(b), math.inf) for b in essential]
    feats.sort(key=lambda f: (f[0], f[1], f[2]))
    return PersistenceDiagram(feats, n, float(max_radius), {"points": pts})


@dataclass
class ConnectivityReport:
    connected: bool
    components_above: int
    thresholds: np.ndarray
    component_counts: np.ndarray


def connectivity_report(diagram: PersistenceDiagram, gap_threshold: float, grid: int = 50) -> ConnectivityReport:
    """Whether every finite degree-0 death is below ``gap_threshold``.

    ``components_above`` counts degree-0 classes (the infinite one included)
    still alive at the threshold. The curve gives the number of components
    as a function of radius.
    """
    h0 = diagram.dim(0)
    finite = h0[np.isfinite(h0[:, 1]), 1]
    alive = int(np.sum(h0[:, 1] > gap_threshold))
    top = float(finite.max()) if finite.size else 1.0
    ts = np.linspace(0, max(top, gap_threshold) * 1.05, grid)
    counts = np.array([int(np.sum(h0[:, 1] > t)) for t in ts])
    return ConnectivityReport(bool(np.all(finite < gap_threshold)), alive, ts, counts)


def dominant_h1(diagram: PersistenceDiagram, cap: float | None = None):
    """(largest H1 persistence, runner-up) with infinite deaths capped at ``cap``."""
    h1 = diagram.dim(1)
    if h1.size == 0:
        return 0.0, 0.0
    cap = diagram.max_radius if cap is None else cap
    pers = np.minimum(h1[:, 1], cap) - h1[:, 0]
    pers = np.sort(pers)[::-1]
    return float(pers[0]), float(pers[1]) if len(pers) > 1 else 0.0


def noise_floor(diagram: PersistenceDiagram) -> float:
    """Sampling scale: the largest finite degree-0 death (radius at which the cloud connects)."""
    h0 = diagram.dim(0)
    finite = h0[np.isfinite(h0[:, 1]), 1]
    return float(finite.max()) if finite.size else 0.0
