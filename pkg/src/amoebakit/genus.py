"""Genus deciders for (lopsided) amoebae of bivariate polynomials."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from .lopsided import cyclic_resultant, dominance_labels
from .poly import NewtonPolynomial, PRESET_SUPPORTS, convex_hull, newton_polytope, preset
from .roots import batch_roots, relative_residual

INF = "inf"


class DegenerateInputError(ValueError):
    pass


class NoPositiveRootError(ArithmeticError):
    pass


class TorusScanError(ArithmeticError):
    def __init__(self, msg, theta=None):
        super().__init__(msg)
        self.theta = theta


def _abs(c) -> np.ndarray:
    return np.abs(np.asarray(c, dtype=complex))


def _check_nonzero(mags, idx, what):
    if np.any(mags[list(idx)] == 0):
        raise DegenerateInputError(f"{what}: coefficients {[i + 1 for i in idx]} must be nonzero")


# ---------------------------------------------------------------------------
# F0 = c1 z + c2 w + c3/z + c4/w + c5


def f0_threshold(c) -> float:
    m = _abs(c)
    return 2 * math.sqrt(m[0] * m[2]) + 2 * math.sqrt(m[1] * m[3])


def genus_f0(c) -> int:
    m = _abs(c)
    if m.size != 5:
        raise ValueError("F0 takes 5 coefficients")
    _check_nonzero(m, range(4), "F0")
    return int(m[4] > f0_threshold(c))


def centre_point_f0(c) -> tuple[float, float]:
    m = _abs(c)
    _check_nonzero(m, range(4), "F0")
    return 0.5 * math.log(m[2] / m[0]), 0.5 * math.log(m[3] / m[1])


# ---------------------------------------------------------------------------
# cubic helper


@dataclass(frozen=True)
class CubicSolution:
    p: float
    q: float
    discriminant: float
    positive_root: float


def solve_cubic_positive_root(a3: float, a2: float, a1: float, a0: float) -> CubicSolution:
    """Largest positive real root of a3 z^3 + a2 z^2 + a1 z + a0 (Cardano, then Newton).

    The cubic is depressed with z = t - a2/(3 a3) to t^3 + p t + q and split on
    the sign of (q/2)^2 + (p/3)^3.
    """
    if a3 == 0:
        raise NoPositiveRootError("leading coefficient is zero")
    b, c, d = a2 / a3, a1 / a3, a0 / a3
    shift = -b / 3
    p = c - b * b / 3
    q = 2 * b**3 / 27 - b * c / 3 + d
    disc = (q / 2) ** 2 + (p / 3) ** 3
    scale = max(abs(q / 2) ** 2, abs(p / 3) ** 3, 1e-300)
    if abs(disc) <= 1e-14 * scale:
        if p == 0:
            ts = [0.0]
        else:
            ts = [3 * q / p, -3 * q / (2 * p)]
    elif disc > 0:
        s = math.sqrt(disc)
        ts = [np.cbrt(-q / 2 + s) + np.cbrt(-q / 2 - s)]
    else:
        r = 2 * math.sqrt(-p / 3)
        arg = (3 * q / (2 * p)) * math.sqrt(-3 / p)
        phi = math.acos(max(-1.0, min(1.0, arg))) / 3
        ts = [r * math.cos(phi - 2 * math.pi * k / 3) for k in range(3)]
    zs = [float(t) + shift for t in ts]
    pos = [z for z in zs if z > 0]
    if not pos:
        raise NoPositiveRootError(f"no positive real root for ({a3}, {a2}, {a1}, {a0})")
    z = max(pos)

    f = lambda v: ((a3 * v + a2) * v + a1) * v + a0
    df = lambda v: (3 * a3 * v + 2 * a2) * v + a1
    for _ in range(8):
        dv = df(z)
        if dv == 0:
            break
        step = f(z) / dv
        if not math.isfinite(step):
            break
        z_new = z - step
        if z_new <= 0:
            break
        z = z_new
        if abs(step) <= 1e-16 * abs(z):
            break
    return CubicSolution(p=p, q=q, discriminant=disc, positive_root=z)


# ---------------------------------------------------------------------------
# L^{3,3,2} = c1 z + c2 w + c3/z + c4/w + c5 z^2 + c6


@dataclass(frozen=True)
class L332Thresholds:
    w0: float
    z0: CubicSolution
    z0_prime: CubicSolution
    a1: float
    a2: float


def l332_thresholds(c) -> L332Thresholds:
    m = _abs(c)
    if m.size != 6:
        raise ValueError("L332 takes 6 coefficients")
    _check_nonzero(m, (1, 2, 3, 4), "L332")
    c1, c2, c3, c4, c5, c6 = m
    w0 = math.sqrt(c4 / c2)
    # |c1 z| dominant: minimise the rest divided by |z|
    sol = solve_cubic_positive_root(c5, 0.0, -(2 * math.sqrt(c2 * c4) + c6), -2 * c3)
    z0 = sol.positive_root
    a1 = c2 * w0 / z0 + c3 / z0**2 + c4 / (z0 * w0) + c5 * z0 + c6 / z0
    # |c6| dominant
    sol2 = solve_cubic_positive_root(2 * c5, c1, 0.0, -c3)
    z0p = sol2.positive_root
    a2 = c1 * z0p + c2 * w0 + c3 / z0p + c4 / w0 + c5 * z0p**2
    return L332Thresholds(w0, sol, sol2, a1, a2)


def genus_l332(c) -> int:
    t = l332_thresholds(c)
    m = _abs(c)
    return int(m[0] > t.a1) + int(m[5] > t.a2)


# ---------------------------------------------------------------------------
# exact lopsided genus via convexity of each dominance region


def _min_logsumexp(a: np.ndarray, d: np.ndarray, max_iter: int = 100) -> float:
    """min over x in R^2 of log sum_j exp(a_j + d_j . x); d spans a cone containing 0 in its interior."""
    x = np.zeros(2)

    def val(x):
        t = a + d @ x
        m = t.max()
        return m + math.log(np.exp(t - m).sum())

    f = val(x)
    for _ in range(max_iter):
        t = a + d @ x
        wts = np.exp(t - t.max())
        wts /= wts.sum()
        g = wts @ d
        H = (d * wts[:, None]).T @ d - np.outer(g, g)
        try:
            step = -np.linalg.solve(H + 1e-14 * np.eye(2), g)
        except np.linalg.LinAlgError:
            step = -g
        lam = 1.0
        while lam > 1e-12:
            fn = val(x + lam * step)
            if fn <= f + 1e-4 * lam * (g @ step):
                break
            lam *= 0.5
        x = x + lam * step
        f_new = val(x)
        if abs(f - f_new) < 1e-15 * max(1.0, abs(f)) and np.linalg.norm(g) < 1e-10:
            f = f_new
            break
        f = f_new
    return f


def dominant_interior_terms(p: NewtonPolynomial) -> list[tuple[int, int]]:
    """Interior exponents whose term dominates all others somewhere in the Log plane.

    Each such term carves out exactly one bounded convex component of the
    complement of the lopsided amoeba, so the list length is its genus.
    """
    poly = newton_polytope(p)
    interior = set(poly.interior_points)
    e = p.exponents.astype(float)
    logc = np.log(np.abs(p.coefficients))
    out = []
    for k, (ex, c) in enumerate(p.terms):
        if ex not in interior:
            continue
        mask = np.arange(len(p)) != k
        a = logc[mask] - logc[k]
        d = e[mask] - e[k]
        if _min_logsumexp(a, d) < 0:
            out.append(ex)
    return out


def genus_lopsided(p: NewtonPolynomial, n: int = 1) -> int:
    """Genus of the lopsided amoeba of the n-th cyclic resultant, without a grid."""
    q = cyclic_resultant(p, n).expanded if n > 1 else p
    return len(dominant_interior_terms(q))


# ---------------------------------------------------------------------------
# exact amoeba membership by scanning a torus fibre


def _univariate_coeffs(p: NewtonPolynomial, fixed: np.ndarray, solve_for: str) -> np.ndarray:
    """Coefficient rows (highest first) of P with one variable fixed at each value of ``fixed``."""
    e = p.exponents
    c = p.coefficients
    var_col, fix_col = (1, 0) if solve_for == "w" else (0, 1)
    lo, hi = e[:, var_col].min(), e[:, var_col].max()
    rows = np.zeros((fixed.size, hi - lo + 1), dtype=complex)
    for (ex, coef) in zip(e, c):
        rows[:, hi - ex[var_col]] += coef * fixed ** ex[fix_col]
    return rows


def _slice_intervals(p: NewtonPolynomial, fixed_logs: np.ndarray, theta_steps: int, solve_for: str):
    """For each fixed log-modulus, the [lo, hi] ranges of sorted root log-moduli over the circle.

    Returns arrays (F, D) lo and hi, or None when P does not involve the solved variable.
    """
    e = p.exponents
    col = 1 if solve_for == "w" else 0
    if e[:, col].max() == e[:, col].min():
        return None
    theta = 2 * np.pi * (np.arange(theta_steps) + 0.5) / theta_steps
    fixed = np.exp(fixed_logs[:, None] + 1j * theta[None, :]).ravel()
    rows = _univariate_coeffs(p, fixed, solve_for)
    lead = rows[:, 0]
    tiny = np.abs(lead) <= 1e-300
    rows[tiny, 0] = 1e-300
    roots, ok = batch_roots(rows)
    if not np.all(ok):
        res = relative_residual_rows(rows[~ok], roots[~ok])
        bad = res.max(axis=1) > 1e-6
        if np.any(bad):
            i = np.flatnonzero(~ok)[np.flatnonzero(bad)[0]]
            raise TorusScanError("root solver did not converge", theta=float(theta[i % theta_steps]))
    with np.errstate(divide="ignore"):
        lr = np.log(np.abs(roots))
    lr = np.sort(lr, axis=1).reshape(fixed_logs.size, theta_steps, -1)
    return lr.min(axis=1), lr.max(axis=1)


def relative_residual_rows(rows, roots):
    return np.stack([relative_residual(a, r) for a, r in zip(rows, roots)])


def _membership_from_intervals(lo, hi, targets, tol):
    # lo, hi: (F, D); targets: (T,) -> (F, T)
    t = targets[None, :, None]
    return np.any((t >= lo[:, None, :] - tol) & (t <= hi[:, None, :] + tol), axis=2)


def exact_membership_torus(p: NewtonPolynomial, x, theta_steps: int = 512, tol: float = 1e-3) -> bool:
    """Whether x lies in the amoeba itself.

    With |z| = e^{x1} fixed and arg z swept over a uniform grid, the k-th
    smallest root modulus |w_k| traces a closed curve, so the amoeba's vertical
    slice at x1 is the union of the ranges [min log|w_k|, max log|w_k|]. The same
    is done with the roles of z and w swapped; a relative slack ``tol`` on the
    modulus absorbs the angular discretisation.
    """
    if theta_steps < 64:
        raise ValueError("theta_steps must be >= 64")
    return bool(torus_membership_grid(p, np.array([x[0]]), np.array([x[1]]), theta_steps, tol)[0, 0])


def torus_membership_grid(p, xs, ys, theta_steps: int = 512, tol: float = 1e-3) -> np.ndarray:
    """Amoeba membership on the grid xs x ys; returned array is indexed [iy, ix]."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    slack = math.log1p(tol)
    out = np.zeros((ys.size, xs.size), dtype=bool)
    w_int = _slice_intervals(p, xs, theta_steps, "w")
    if w_int is not None:
        out |= _membership_from_intervals(*w_int, ys, slack).T
    z_int = _slice_intervals(p, ys, theta_steps, "z")
    if z_int is not None:
        out |= _membership_from_intervals(*z_int, xs, slack)
    return out


# ---------------------------------------------------------------------------
# grid scan


@dataclass
class GenusReport:
    genus: int
    components: list[tuple[tuple[float, float, float, float], int]]
    window: tuple[float, float, float, float]
    resolution: int
    level_n: int | str
    warnings: list[str] = field(default_factory=list)
    mask: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "genus": self.genus,
            "components": [{"box": list(b), "pixels": n} for b, n in self.components],
            "window": list(self.window),
            "resolution": self.resolution,
            "level_n": self.level_n,
            "warnings": list(self.warnings),
        }


def tropical_vertices(p: NewtonPolynomial) -> np.ndarray:
    """Points where three or more terms tie for the largest magnitude."""
    e = p.exponents.astype(float)
    L = np.log(np.abs(p.coefficients))
    out = []
    n = len(p)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                D = np.array([e[b] - e[a], e[c] - e[a]])
                det = D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]
                if det == 0:
                    continue
                x = np.linalg.solve(D, [L[a] - L[b], L[a] - L[c]])
                vals = L + e @ x
                if vals.max() <= vals[a] + 1e-9 * max(1.0, abs(vals[a])):
                    out.append(x)
    return np.array(out).reshape(-1, 2)


def default_window(p: NewtonPolynomial) -> tuple[float, float, float, float]:
    """[-R, R]^2 with R = max(ln sum|c| + 3, reach of the tropical curve's vertices + ln(#terms) + 1).

    Bounded complement components sit inside cells of the tropical curve and
    the lopsided amoeba stays within ln(#terms) of it, so the second term keeps
    every hole inside the window even when some coefficient is tiny.
    """
    r = max(math.log(float(np.abs(p.coefficients).sum())) + 3, 3.0)
    v = tropical_vertices(p)
    if len(v):
        r = max(r, float(np.abs(v).max()) + math.log(len(p)) + 1)
    return (-r, r, -r, r)


def _as_window(window) -> tuple[float, float, float, float]:
    if np.isscalar(window):
        r = float(window)
        return (-r, r, -r, r)
    w = tuple(float(v) for v in window)
    if len(w) != 4 or w[1] <= w[0] or w[3] <= w[2]:
        raise ValueError(f"bad window {window!r}")
    return w  # type: ignore[return-value]


def cell_centres(window, resolution):
    x0, x1, y0, y1 = window
    hx = (x1 - x0) / resolution
    hy = (y1 - y0) / resolution
    xs = x0 + (np.arange(resolution) + 0.5) * hx
    ys = y0 + (np.arange(resolution) + 0.5) * hy
    return xs, ys


def membership_labels(p, n, window, resolution, theta_steps=512, tol=1e-3):
    """Label grid indexed [iy, ix]: -1 for amoeba cells, else a complement label.

    For finite n the complement label is the index of the dominating term of
    the cyclic resultant; for n = INF every complement cell gets label 0.
    Also returns the polynomial whose terms the labels refer to (None for INF).
    """
    xs, ys = cell_centres(window, resolution)
    if n == INF:
        member = torus_membership_grid(p, xs, ys, theta_steps, tol)
        return np.where(member, -1, 0), None
    q = cyclic_resultant(p, int(n)).expanded
    X, Y = np.meshgrid(xs, ys)
    return dominance_labels(q, X, Y), q


def genus_grid_scan(
    p: NewtonPolynomial,
    n: int | str = 1,
    window=None,
    resolution: int = 256,
    theta_steps: int = 512,
    tol: float = 1e-3,
) -> GenusReport:
    """Count bounded complement components of the (lopsided) amoeba on a grid.

    Cells are classified at their centres and flood-filled with 4-connectivity.
    For finite n two cells only join when the same term dominates both; the
    dominance regions are convex, so this is the true component structure and
    it cannot leak through amoeba walls thinner than a cell. Components that
    touch the window border are treated as unbounded.
    """
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    window = default_window(p) if window is None else _as_window(window)
    labels, q = membership_labels(p, n, window, resolution, theta_steps, tol)
    xs, ys = cell_centres(window, resolution)
    hx = xs[1] - xs[0]
    hy = ys[1] - ys[0]
    warnings = []
    interior = set(newton_polytope(q).interior_points) if q is not None else set()
    structure = ndimage.generate_binary_structure(2, 1)
    comps = []
    for lab in np.unique(labels):
        if lab < 0:
            continue
        cc, count = ndimage.label(labels == lab, structure=structure)
        if count == 0:
            continue
        border = set(np.unique(np.concatenate([cc[0], cc[-1], cc[:, 0], cc[:, -1]])))
        for k in range(1, count + 1):
            if k in border:
                if q is not None and q.support[lab] in interior:
                    warnings.append("window-too-small")
                continue
            iy, ix = np.nonzero(cc == k)
            box = (
                float(xs[ix.min()] - hx / 2),
                float(xs[ix.max()] + hx / 2),
                float(ys[iy.min()] - hy / 2),
                float(ys[iy.max()] + hy / 2),
            )
            comps.append((box, int(iy.size)))
    comps.sort()
    return GenusReport(
        genus=len(comps),
        components=comps,
        window=window,
        resolution=resolution,
        level_n=n if n == INF else int(n),
        warnings=sorted(set(warnings)),
        mask=labels < 0,
    )


# ---------------------------------------------------------------------------
# crawling


@dataclass
class CrawlResult:
    values: list[float]
    reports: list[GenusReport]
    boundaries: np.ndarray  # (len(values), res, res) bool
    degenerate: list[bool]


def boundary_mask(member: np.ndarray) -> np.ndarray:
    """Amoeba cells with at least one 4-neighbour outside the amoeba."""
    inner = ndimage.binary_erosion(member, structure=ndimage.generate_binary_structure(2, 1), border_value=1)
    return member & ~inner


def _is_degenerate(name: str, coeffs) -> bool:
    support = PRESET_SUPPORTS[name]
    verts = set(convex_hull(support))
    return any(coeffs[k] == 0 for k, e in enumerate(support) if e in verts)


def crawl_sweep(
    name: str,
    base: Sequence[complex],
    index: int,
    values: Sequence[float],
    n: int | str = 1,
    window=None,
    resolution: int = 256,
) -> CrawlResult:
    """Vary coefficient ``index`` (0-based) of preset ``name`` over ``values``.

    All scans share one window so the boundary masks stack into a crawl volume.
    Members with a vanishing vertex coefficient are flagged degenerate; their
    scan still runs on the reduced support.
    """
    if len(values) == 0:
        raise ValueError("values must be nonempty")
    polys, degen = [], []
    for v in values:
        cs = list(base)
        cs[index] = v
        degen.append(_is_degenerate(name, cs))
        polys.append(preset(name, cs))
    if window is None:
        wins = [default_window(pp) for pp in polys]
        r = max(w[1] for w in wins)
        window = (-r, r, -r, r)
    window = _as_window(window)
    reports, masks = [], []
    for pp, dg in zip(polys, degen):
        rep = genus_grid_scan(pp, n, window, resolution)
        if dg:
            rep.warnings.append("degenerate")
        reports.append(rep)
        masks.append(boundary_mask(rep.mask))
    return CrawlResult(list(values), reports, np.stack(masks), degen)
