"""Small numerical helpers: certified bisection and high-order differences."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NumericalFailure


def bisect_increasing(f: Callable[[float], float], lo: float, hi: float,
                      xtol: float = 0.0, maxiter: int = 2000) -> float:
    """Root of an increasing function on ``[lo, hi]`` by bisection.

    Iterates until the bracket cannot be halved in floating point (or its
    width drops below ``xtol``), so tiny roots are resolved to full
    relative precision.

    Parameters
    ----------
    f : callable
        Function with ``f(lo) <= 0 <= f(hi)``.
    lo, hi : float
        Bracket.
    xtol : float
        Absolute width at which to stop early. Zero means machine precision.

    Returns
    -------
    float
        Midpoint of the final bracket (or an endpoint that is an exact zero).
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (flo < 0.0 < fhi):
        raise NumericalFailure("bisection bracket does not straddle a root",
                               {"lo": lo, "hi": hi, "f_lo": flo, "f_hi": fhi})
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fornberg_weights(nodes: np.ndarray, x0: float, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at ``x0``.

    Fornberg's recursion on arbitrary (distinct) nodes.
    """
    z = np.asarray(nodes, dtype=float)
    n = z.size
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5 = 1.0, c4
        c4 = z[i] - x0
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def derivative_matrix(x: np.ndarray, order: int = 1, width: int = 5):
    """Dense-band differentiation operator on a (possibly non-uniform) grid.

    Interior rows use a centered ``width``-point stencil, rows near the ends
    use the nearest ``width`` nodes (one-sided). Returns ``(idx, w)`` such
    that ``d[i] = sum(w[i] * f[idx[i]])``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < width:
        width = n
    half = width // 2
    idx = np.empty((n, width), dtype=int)
    w = np.empty((n, width))
    for i in range(n):
        start = min(max(i - half, 0), n - width)
        sl = np.arange(start, start + width)
        idx[i] = sl
        w[i] = fornberg_weights(x[sl], x[i], order)
    return idx, w


def differentiate(f: np.ndarray, x: np.ndarray, order: int = 1,
                  axis: int = 0, width: int = 5) -> np.ndarray:
    """Differentiate samples ``f`` along ``axis`` with a ``width``-point stencil."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    idx, w = derivative_matrix(x, order, width)
    out = np.einsum("ij,ij...->i...", w, f[idx])
    return np.moveaxis(out, 0, axis)


def even_pole_extrapolate(v1: np.ndarray, v2: np.ndarray, v3: np.ndarray) -> np.ndarray:
    """Value at a pole of an even function from nodes at h, 2h, 3h.

    Exact for polynomials in x^2 of degree 2.
    """
    return 1.5 * v1 - 0.6 * v2 + 0.1 * v3
