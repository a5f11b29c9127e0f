"""Simultaneous (Aberth) iteration for univariate complex polynomials."""
from __future__ import annotations

import numpy as np


class RootFindingError(ArithmeticError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


def _horner(a: np.ndarray, x: np.ndarray):
    """p(x) and p'(x); ``a`` is (B, d+1) highest degree first, ``x`` is (B, m)."""
    p = np.broadcast_to(a[:, :1], x.shape).astype(complex)
    dp = np.zeros_like(p)
    for k in range(1, a.shape[1]):
        dp = dp * x + p
        p = p * x + a[:, k : k + 1]
    return p, dp


def _quadratic(a: np.ndarray) -> np.ndarray:
    b, c = a[:, 1] / a[:, 0], a[:, 2] / a[:, 0]
    disc = np.sqrt(b * b - 4 * c)
    # pick the sign that avoids cancellation
    s = np.where((np.conj(b) * disc).real >= 0, 1.0, -1.0)
    q = -0.5 * (b + s * disc)
    safe_q = np.where(q == 0, 1.0, q)
    r1 = q
    r2 = np.where(q == 0, 0.0, c / safe_q)
    return np.stack([r1, r2], axis=1)


def batch_roots(a, max_iter: int = 200, tol: float = 1e-14) -> tuple[np.ndarray, np.ndarray]:
    """Roots of many polynomials of the same degree at once.

    Parameters
    ----------
    a : (B, d+1) complex array, highest degree first, nonzero leading entry.

    Returns
    -------
    roots : (B, d) complex array
    converged : (B,) bool array
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    B, d1 = a.shape
    d = d1 - 1
    if d < 1:
        raise ValueError("degree must be at least 1")
    if d == 1:
        return (-a[:, 1:2] / a[:, :1]), np.ones(B, dtype=bool)
    if d == 2:
        return _quadratic(a), np.ones(B, dtype=bool)

    a = a / a[:, :1]
    # initial circle radius: geometric mean of root moduli, guarded against zero
    const = np.abs(a[:, -1])
    cauchy = 1.0 + np.abs(a[:, 1:]).max(axis=1)
    radius = np.where(const > 0, const ** (1.0 / d), 0.5 * cauchy)
    radius = np.clip(radius, 1e-12 * cauchy, cauchy)
    ang = 2 * np.pi * np.arange(d) / d + 0.4
    x = radius[:, None] * np.exp(1j * ang)[None, :]

    active = np.ones(B, dtype=bool)
    eye = np.eye(d, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        p, dp = _horner(a[idx], xa)
        diff = xa[:, :, None] - xa[:, None, :]
        diff[:, eye] = 1.0
        inv = 1.0 / diff
        inv[:, eye] = 0.0
        s = inv.sum(axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = p / dp
            step = newton / (1.0 - newton * s)
        step = np.where(np.isfinite(step), step, 0.0)
        x[idx] = xa - step
        done = np.all(np.abs(step) <= tol * np.maximum(np.abs(xa), 1e-300) + 1e-300, axis=1)
        active[idx[done]] = False
    converged = ~active

    # one Newton polish
    p, dp = _horner(a, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = p / dp
    x = np.where(np.isfinite(corr), x - corr, x)
    return x, converged


def relative_residual(coeffs, roots) -> np.ndarray:
    """|p(r)| / sum_k |a_k| |r|^k for each root."""
    a = np.asarray(coeffs, dtype=complex)
    r = np.asarray(roots, dtype=complex)
    val = np.polyval(a, r)
    scale = np.polyval(np.abs(a), np.abs(r))
    return np.abs(val) / np.where(scale > 0, scale, 1.0)


def solve_univariate_roots(coeffs, tol: float = 1e-8, max_iter: int = 200) -> np.ndarray:
    """All complex roots of ``coeffs[0] x^d + ... + coeffs[d]``.

    Leading zeros are stripped and trailing zeros give exact roots at 0.
    Raises :class:`RootFindingError` if any root fails the residual check
    ``|p(r)| < tol * sum |a_k||r|^k`` after iteration.
    """
    a = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if a.size < 2:
        raise ValueError("polynomial must have degree >= 1")
    nz = np.trim_zeros(a, "b")
    zeros = np.zeros(a.size - nz.size, dtype=complex)
    if nz.size < 2:
        return zeros
    roots, ok = batch_roots(nz[None, :], max_iter=max_iter)
    roots = roots[0]
    res = relative_residual(nz, roots)
    if not ok[0] and np.any(res >= tol):
        raise RootFindingError(f"Aberth iteration did not converge (max residual {res.max():.3g})", best=roots)
    if np.any(res >= tol):
        raise RootFindingError(f"root residual {res.max():.3g} above tolerance", best=roots)
    return np.concatenate([roots, zeros])
