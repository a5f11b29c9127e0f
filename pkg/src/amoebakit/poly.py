"""Sparse bivariate Laurent polynomials, Newton polygons and monomial transforms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

Exponent = tuple[int, int]


class InvalidPolynomialError(ValueError):
    pass


class InvalidTransformError(ValueError):
    pass


class PolyDomainError(ValueError):
    pass


@dataclass(frozen=True)
class NewtonPolynomial:
    """P(z, w) = sum of c * z**i * w**j over a finite support.

    Terms are kept in lexicographic order on (i, j); that order is the
    canonical monomial order used everywhere else in the package.
    """

    terms: tuple[tuple[Exponent, complex], ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidPolynomialError("polynomial needs at least one nonzero term")

    @property
    def support(self) -> list[Exponent]:
        return [e for e, _ in self.terms]

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=complex)

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.support, dtype=np.int64).reshape(-1, 2)

    def as_dict(self) -> dict[Exponent, complex]:
        return dict(self.terms)

    def __len__(self):
        return len(self.terms)

    def __call__(self, z, w):
        return evaluate(self, z, w)

    def __add__(self, other: "NewtonPolynomial") -> "NewtonPolynomial":
        out = self.as_dict()
        for e, c in other.terms:
            out[e] = out.get(e, 0) + c
        return build_polynomial(out)

    def __mul__(self, other):
        if isinstance(other, NewtonPolynomial):
            return multiply(self, other)
        return build_polynomial({e: c * other for e, c in self.terms})

    __rmul__ = __mul__

    def scaled_phases(self, zphase: complex, wphase: complex) -> "NewtonPolynomial":
        """P(zphase * z, wphase * w)."""
        return build_polynomial(
            {(i, j): c * zphase**i * wphase**j for (i, j), c in self.terms}
        )

    def __str__(self):
        parts = []
        for (i, j), c in self.terms:
            c = complex(c)
            cs = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
            mono = "".join(
                s for s in (_pow("z", i), _pow("w", j)) if s
            )
            parts.append(cs + ("*" + mono if mono else ""))
        return " + ".join(parts)


def _pow(var, k):
    if k == 0:
        return ""
    return var if k == 1 else f"{var}^{k}"


def build_polynomial(terms: Mapping[Exponent, complex] | Iterable, drop_tol: float = 0.0) -> NewtonPolynomial:
    """Build a polynomial from ``{(i, j): c}``; terms with ``|c| <= drop_tol`` are dropped."""
    if isinstance(terms, Mapping):
        items = terms.items()
    else:
        items = terms
    acc: dict[Exponent, complex] = {}
    for (i, j), c in items:
        key = (int(i), int(j))
        acc[key] = acc.get(key, 0) + complex(c)
    kept = tuple(sorted((e, c) for e, c in acc.items() if abs(c) > drop_tol))
    if not kept:
        raise InvalidPolynomialError("all coefficients vanish")
    return NewtonPolynomial(kept)


def multiply(p: NewtonPolynomial, q: NewtonPolynomial, prune: float = 0.0) -> NewtonPolynomial:
    """Sparse product; coefficients below ``prune * max|c|`` are removed."""
    acc: dict[Exponent, complex] = {}
    for (i1, j1), c1 in p.terms:
        for (i2, j2), c2 in q.terms:
            key = (i1 + i2, j1 + j2)
            acc[key] = acc.get(key, 0) + c1 * c2
    scale = max(abs(c) for c in acc.values())
    return build_polynomial(acc, drop_tol=prune * scale)


def evaluate(p: NewtonPolynomial, z, w):
    """Sum of c z^i w^j. Works elementwise on numpy arrays."""
    exps = p.exponents
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if (exps[:, 0].min() < 0 and np.any(z == 0)) or (exps[:, 1].min() < 0 and np.any(w == 0)):
        raise PolyDomainError("negative exponent evaluated at zero")
    total = np.zeros(np.broadcast(z, w).shape, dtype=complex)
    for (i, j), c in p.terms:
        total = total + c * z**i * w**j
    return total[()] if total.ndim == 0 else total


def log_map(z, w) -> tuple[float, float]:
    if z == 0 or w == 0:
        raise PolyDomainError("Log is undefined at 0")
    return math.log(abs(z)), math.log(abs(w))


# ---------------------------------------------------------------------------
# Newton polygon


@dataclass(frozen=True)
class Polytope:
    vertices: tuple[Exponent, ...]
    lattice_points: tuple[Exponent, ...]
    interior_points: tuple[Exponent, ...]
    boundary_points: tuple[Exponent, ...] = field(default=())

    def axis_extent(self) -> int:
        """max over axes of (max - min) vertex coordinate."""
        v = np.array(self.vertices).reshape(-1, 2)
        return int((v.max(axis=0) - v.min(axis=0)).max())


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Exponent]) -> list[Exponent]:
    """Monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Exponent] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Exponent] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _locate(hull: list[Exponent], pt) -> int:
    """1 strictly inside, 0 on boundary, -1 outside (hull ccw, >= 3 vertices)."""
    inside = True
    for a, b in zip(hull, hull[1:] + hull[:1]):
        c = _cross(a, b, pt)
        if c < 0:
            return -1
        if c == 0:
            inside = False
    return 1 if inside else 0


def hull_lattice_points(hull: list[Exponent]) -> tuple[list[Exponent], list[Exponent]]:
    """(all lattice points, strictly interior points) of a lattice polygon."""
    if len(hull) < 3:
        if len(hull) == 1:
            return list(hull), []
        (x0, y0), (x1, y1) = hull
        g = math.gcd(x1 - x0, y1 - y0)
        dx, dy = (x1 - x0) // g, (y1 - y0) // g
        return [(x0 + k * dx, y0 + k * dy) for k in range(g + 1)], []
    xs = [p[0] for p in hull]
    ys = [p[1] for p in hull]
    allp, inner = [], []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            loc = _locate(hull, (x, y))
            if loc >= 0:
                allp.append((x, y))
                if loc == 1:
                    inner.append((x, y))
    return allp, inner


def newton_polytope(p: NewtonPolynomial) -> Polytope:
    hull = convex_hull(p.support)
    allp, inner = hull_lattice_points(hull)
    inner_set = set(inner)
    return Polytope(
        vertices=tuple(hull),
        lattice_points=tuple(allp),
        interior_points=tuple(inner),
        boundary_points=tuple(q for q in allp if q not in inner_set),
    )


def max_genus(p: NewtonPolynomial) -> int:
    return len(newton_polytope(p).interior_points)


# ---------------------------------------------------------------------------
# Monomial transforms  P(z, w) -> P(a1 z^M11 w^M21, a2 z^M12 w^M22)


@dataclass(frozen=True)
class UnimodularTransform:
    M: tuple[tuple[int, int], tuple[int, int]]
    alpha: tuple[complex, complex] = (1, 1)

    def __post_init__(self):
        m = np.array(self.M)
        if m.shape != (2, 2):
            raise InvalidTransformError("M must be 2x2")
        if round(np.linalg.det(m)) == 0:
            raise InvalidTransformError("M is singular")
        if self.alpha[0] == 0 or self.alpha[1] == 0:
            raise InvalidTransformError("alpha must be nonzero")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.M, dtype=np.int64)

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.M
        return a * d - b * c

    def log_shift(self) -> np.ndarray:
        return np.log(np.abs(np.array(self.alpha, dtype=complex)))

    def substitute(self, z, w):
        """The point (z', w') at which the original P is evaluated."""
        (m11, m12), (m21, m22) = self.M
        a1, a2 = self.alpha
        return a1 * z**m11 * w**m21, a2 * z**m12 * w**m22

    def map_back(self, pts: np.ndarray) -> np.ndarray:
        """Send Log points of the transformed curve to Log points of the original.

        If (z, w) solves the transformed polynomial then ``substitute(z, w)``
        solves the original, so ``x = M^T y + Log|alpha|``.
        """
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return pts @ self.matrix.astype(float) + self.log_shift()


def transform(p: NewtonPolynomial, t: UnimodularTransform) -> NewtonPolynomial:
    m = t.matrix
    a1, a2 = (complex(a) for a in t.alpha)
    out = {}
    for (i, j), c in p.terms:
        ni, nj = m @ np.array([i, j])
        out[(int(ni), int(nj))] = c * a1**i * a2**j
    return build_polynomial(out)


def parse_matrix(text: str) -> tuple[tuple[int, int], tuple[int, int]]:
    """``"a,b;c,d"`` -> ((a, b), (c, d))."""
    rows = [r.split(",") for r in text.replace(" ", "").split(";")]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise InvalidTransformError(f"cannot parse matrix {text!r}")
    return tuple(tuple(int(v) for v in r) for r in rows)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Presets and the text format


PRESET_SUPPORTS: dict[str, list[Exponent]] = {
    # c1 z + c2 w + c3/z + c4/w + c5
    "f0": [(1, 0), (0, 1), (-1, 0), (0, -1), (0, 0)],
    # c1 z + c2 w + c3/z + c4/w + c5 z^2 + c6
    "l332": [(1, 0), (0, 1), (-1, 0), (0, -1), (2, 0), (0, 0)],
    # c0 + c1 z + ... + c14 z^4 w^2, row by row in w
    "cz2z4": [(i, j) for j in range(3) for i in range(5)],
    # c0 + c1 z + c2 z^2 + c3 w + c4 zw + c5 z^2w + c6 w^2 + c7 zw^2 + c8 z^2w^2 + c9 z^3w^2 + c10 z^2w^3
    "k4532": [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2), (3, 2), (2, 3)],
}

PRESET_DEFAULTS: dict[str, list[float]] = {
    "f0": [1, 1, 1, 1, 5],
    "l332": [1, 1, 1, 1, 1, 1],
    "cz2z4": [1.0] * 15,
    "k4532": [1.0] * 11,
}


def preset(name: str, coeffs: Iterable[complex] | None = None) -> NewtonPolynomial:
    """One of the named families with coefficients in the family's own order.

    Zero coefficients are allowed (degenerate members); at least one must be nonzero.
    """
    try:
        support = PRESET_SUPPORTS[name]
    except KeyError:
        raise InvalidPolynomialError(f"unknown preset {name!r}") from None
    cs = list(PRESET_DEFAULTS[name] if coeffs is None else coeffs)
    if len(cs) != len(support):
        raise InvalidPolynomialError(f"preset {name} takes {len(support)} coefficients, got {len(cs)}")
    return build_polynomial(list(zip(support, cs)))


def coefficient_vector(name: str, p: NewtonPolynomial) -> np.ndarray:
    d = p.as_dict()
    return np.array([d.get(e, 0) for e in PRESET_SUPPORTS[name]], dtype=complex)


def parse_poly_text(text: str) -> NewtonPolynomial:
    """Lines of ``i j re [im]``; ``#`` starts a comment."""
    terms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise InvalidPolynomialError(f"line {lineno}: expected 'i j re im', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            re_ = float(parts[2])
            im = float(parts[3]) if len(parts) == 4 else 0.0
        except ValueError as exc:
            raise InvalidPolynomialError(f"line {lineno}: {exc}") from None
        terms.append(((i, j), complex(re_, im)))
    return build_polynomial(terms)


def format_poly_text(p: NewtonPolynomial) -> str:
    lines = []
    for (i, j), c in p.terms:
        c = complex(c)
        lines.append(f"{i} {j} {c.real:.17g} {c.imag:.17g}")
    return "\n".join(lines) + "\n"
