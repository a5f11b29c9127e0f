"""Lopsided lists, cyclic resultants and the lopsided amoeba."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .poly import NewtonPolynomial, build_polynomial, multiply, newton_polytope

DEFAULT_MAX_N = 4
DEFAULT_PRUNE = 1e-9  # relative to the cancellation-free bound of each term


class LopsidedInputError(ValueError):
    pass


class ResultantRangeError(ValueError):
    pass


def is_lopsided(values) -> bool:
    """True iff the largest entry strictly exceeds the sum of the others."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise LopsidedInputError("empty list")
    if np.any(v <= 0):
        raise LopsidedInputError("entries must be positive")
    k = int(np.argmax(v))
    rest = float(np.sum(np.delete(v, k)))
    return bool(v[k] > rest)


def log_magnitudes(p: NewtonPolynomial, x1, x2) -> np.ndarray:
    """log|c| + i*x1 + j*x2 for every term, stacked on the last axis."""
    e = p.exponents.astype(float)
    logc = np.log(np.abs(p.coefficients))
    x1 = np.asarray(x1, dtype=float)[..., None]
    x2 = np.asarray(x2, dtype=float)[..., None]
    return logc + e[:, 0] * x1 + e[:, 1] * x2


def magnitudes_at(p: NewtonPolynomial, x) -> np.ndarray:
    """The list f{x}: |c| exp(i x1 + j x2), in the polynomial's lexicographic term order."""
    return np.exp(log_magnitudes(p, x[0], x[1]))


def dominance_labels(p: NewtonPolynomial, x1, x2) -> np.ndarray:
    """Index of the term that dominates the rest at each point, or -1.

    Computed in log space so that large exponents at far-out points do not
    overflow. -1 marks points of the lopsided amoeba.
    """
    lm = log_magnitudes(p, x1, x2)
    k = np.argmax(lm, axis=-1)
    top = np.take_along_axis(lm, k[..., None], axis=-1)
    ratio = np.exp(lm - top)
    rest = ratio.sum(axis=-1) - 1.0
    return np.where(rest < 1.0, k, -1)


@dataclass(frozen=True)
class CyclicResultant:
    base: NewtonPolynomial
    n: int
    expanded: NewtonPolynomial


def _balanced_product(factors: list[NewtonPolynomial], prune: float) -> NewtonPolynomial:
    while len(factors) > 1:
        nxt = []
        for a, b in zip(factors[::2], factors[1::2]):
            nxt.append(multiply(a, b, prune=prune))
        if len(factors) % 2:
            nxt.append(factors[-1])
        factors = nxt
    return factors[0]


@lru_cache(maxsize=256)
def _expand(p: NewtonPolynomial, n: int, prune: float) -> NewtonPolynomial:
    roots = [complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n)]
    # snap exact values (1, -1, i, -i) so that real inputs stay real
    roots = [complex(round(r.real, 15), round(r.imag, 15)) for r in roots]
    factors = [p.scaled_phases(a, b) for a in roots for b in roots]
    out = _balanced_product(factors, prune=0.0)
    # the same product with |c| bounds what each coefficient could have been
    # before cancellation; only terms that cancelled to round-off are dropped
    absp = build_polynomial({e: abs(c) for e, c in p.terms})
    bound = _balanced_product([absp] * (n * n), prune=0.0).as_dict()
    kept = {e: c for e, c in out.terms if abs(c) > prune * bound[e].real}
    return build_polynomial(kept)


def cyclic_resultant(
    p: NewtonPolynomial, n: int, max_n: int = DEFAULT_MAX_N, prune: float = DEFAULT_PRUNE
) -> CyclicResultant:
    """Product of P(e^{2 pi i a/n} z, e^{2 pi i b/n} w) over 0 <= a, b < n."""
    if not isinstance(n, (int, np.integer)) or n < 1 or n > max_n:
        raise ResultantRangeError(f"n must be an integer in [1, {max_n}], got {n!r}")
    if n == 1:
        return CyclicResultant(p, 1, p)
    return CyclicResultant(p, int(n), _expand(p, int(n), float(prune)))


def lopsided_membership(p: NewtonPolynomial, n: int, x, max_n: int = DEFAULT_MAX_N) -> bool:
    """True iff x lies in the lopsided amoeba of the n-th cyclic resultant."""
    q = cyclic_resultant(p, n, max_n=max_n).expanded
    return not is_lopsided(magnitudes_at(q, x))


def approximation_epsilon(p: NewtonPolynomial, n: int) -> float:
    """Distance beyond which complement points are certified lopsided at level n.

    Uses the two-dimensional form (log n + log 8c) / n, where c is the largest
    per-axis extent of the Newton polygon's vertices.
    """
    if n < 1:
        raise ResultantRangeError("n must be positive")
    c = newton_polytope(p).axis_extent()
    if c == 0:
        return math.inf
    return (math.log(n) + math.log(8 * c)) / n
