"""Cumulative quadrature on uniform grids.

Every ``∫_0^x`` in the package goes through :func:`cumulative_from_center`
(integration outward from the middle node) or :func:`cumulative_from_start`
(integration from the first node along an axis).

Two schemes are available:

``"trapezoid"``
    composite trapezoid, second order.
``"poly5"``
    each cell ``[x_i, x_{i+1}]`` is integrated exactly against the degree-5
    interpolant through six neighbouring nodes, so integrals of polynomials
    of degree <= 5 are exact up to rounding.  With ``causal=True`` the
    stencil never reaches past ``x_{i+1}`` (degree drops near the start),
    which keeps Volterra-type recursions free of look-ahead.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

SCHEMES = ("trapezoid", "poly5")


@lru_cache(maxsize=None)
def cell_weights(offsets: tuple[int, ...]) -> tuple[float, ...]:
    """Weights ``w`` with ``∫_0^1 p = Σ w_k p(o_k)`` for deg p < len(offsets)."""
    n = len(offsets)
    # exact rational solve of the transposed Vandermonde system
    A = [[Fraction(o) ** d for o in offsets] + [Fraction(1, d + 1)]
         for d in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                fac = A[r][col] / A[col][col]
                A[r] = [a - fac * b for a, b in zip(A[r], A[col])]
    return tuple(float(A[r][n] / A[r][r]) for r in range(n))


def _stencil_plan(n: int, scheme: str, causal: bool):
    """List of ``(first_cell, last_cell, offsets)`` covering cells 0..n-2."""
    if scheme == "trapezoid" or n == 2:
        return [(0, n - 2, (0, 1))]
    if scheme != "poly5":
        raise ValueError(f"unknown quadrature scheme {scheme!r}")
    width = min(6, n)
    plan = []
    if causal:
        for i in range(min(width - 2, n - 1)):
            plan.append((i, i, tuple(range(-i, 2))))
        if width - 2 <= n - 2:
            plan.append((width - 2, n - 2, tuple(range(-(width - 2), 2))))
        return plan
    lead = (width - 2) // 2
    cells = []
    for i in range(n - 1):
        s = min(max(i - lead, 0), n - width)
        cells.append(tuple(range(s - i, s - i + width)))
    start = 0
    for i in range(1, n):
        if i == n - 1 or cells[i] != cells[start]:
            plan.append((start, i - 1, cells[start]))
            start = i
    return plan


def cell_integrals(values: np.ndarray, step: float, axis: int = 0,
                   scheme: str = "poly5", causal: bool = False) -> np.ndarray:
    """Integrals over each cell ``[x_i, x_{i+1}]`` along ``axis``."""
    f = np.moveaxis(np.asarray(values), axis, 0)
    n = f.shape[0]
    if n < 2:
        return np.zeros((0,) + f.shape[1:], dtype=f.dtype)
    out = np.empty((n - 1,) + f.shape[1:], dtype=np.result_type(f, float))
    for lo, hi, offsets in _stencil_plan(n, scheme, causal):
        w = cell_weights(offsets)
        acc = w[0] * f[lo + offsets[0]:hi + 1 + offsets[0]]
        for wk, o in zip(w[1:], offsets[1:]):
            acc += wk * f[lo + o:hi + 1 + o]
        out[lo:hi + 1] = acc
    out *= step
    return np.moveaxis(out, 0, axis)


def cumulative_from_start(values: np.ndarray, step: float, axis: int = 0,
                          scheme: str = "poly5",
                          causal: bool = False) -> np.ndarray:
    """``F[j] = ∫_{x_0}^{x_j} f`` along ``axis`` with ``F[0] = 0``."""
    cells = cell_integrals(values, step, axis, scheme, causal)
    cells = np.moveaxis(cells, axis, 0)
    out = np.zeros((cells.shape[0] + 1,) + cells.shape[1:], dtype=cells.dtype)
    np.cumsum(cells, axis=0, out=out[1:])
    return np.moveaxis(out, 0, axis)


def cumulative_from_center(values: np.ndarray, step: float, axis: int = 0,
                           scheme: str = "poly5",
                           causal: bool = False) -> np.ndarray:
    """``F[j] = ∫_0^{x_j} f`` where the middle node along ``axis`` is ``x = 0``.

    Accumulation runs outward from the center in both directions, so
    ``F`` vanishes exactly at the center.
    """
    f = np.moveaxis(np.asarray(values), axis, 0)
    n = f.shape[0]
    if n % 2 == 0:
        raise ValueError("center integration needs an odd node count")
    c = n // 2
    pos = cumulative_from_start(f[c:], step, 0, scheme, causal)
    neg = -cumulative_from_start(f[c::-1], step, 0, scheme, causal)
    out = np.concatenate([neg[:0:-1], pos], axis=0)
    return np.moveaxis(out, 0, axis)
