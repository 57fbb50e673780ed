"""Recursive integral systems X^(n), X~^(n) and the function systems built
from them.

For a nonvanishing ``f`` with ``f(0) = 1``::

    X^(0) = X~^(0) = 1
    X^(n)  = n ∫_0^x X^(n-1)  [f²]^((-1)^n)     dρ
    X~^(n) = n ∫_0^x X~^(n-1) [f²]^((-1)^(n-1)) dρ

``phi_k = f X^(k)`` (k odd) / ``f X~^(k)`` (k even), and for the reciprocal
system ``phi~_k = X^(k)/f`` (k even) / ``X~^(k)/f`` (k odd).  The y-systems
(``Y``, ``psi``) are the same objects built from ``g`` on the y-grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Unnormalized, VanishingGenerator
from .grids import ComplexField1D
from .quadrature import cumulative_from_center


def cumulative_integral(u: ComplexField1D, scheme: str = "poly5") -> ComplexField1D:
    """``v(x) = ∫_0^x u`` with ``v(0) = 0``, accumulated outward from 0."""
    return ComplexField1D(
        u.grid, cumulative_from_center(u.samples, u.grid.step, scheme=scheme))


@dataclass
class XSystems:
    direct: list[ComplexField1D]
    tilde: list[ComplexField1D]

    @property
    def n_max(self) -> int:
        return len(self.direct) - 1

    def swapped(self) -> "XSystems":
        """Systems of ``1/f``: the two recursions trade places."""
        return XSystems(self.tilde, self.direct)


def _check_generator(f: ComplexField1D, eps_f: float):
    if np.min(np.abs(f.samples)) < eps_f:
        raise VanishingGenerator(
            f"|f| drops below {eps_f:g} on the grid")
    if abs(f.at_center - 1.0) > 1e-12:
        raise Unnormalized(f"f(0) = {f.at_center} but must equal 1")


def build_x_systems(f: ComplexField1D, n_max: int, eps_f: float = 1e-12,
                    scheme: str = "poly5") -> XSystems:
    _check_generator(f, eps_f)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    grid = f.grid
    f2 = f.samples ** 2
    weight = {1: f2, -1: 1.0 / f2}
    one = np.ones(grid.point_count, dtype=complex)
    direct = [ComplexField1D(grid, one)]
    tilde = [ComplexField1D(grid, one.copy())]
    for n in range(1, n_max + 1):
        sign = (-1) ** n
        direct.append(ComplexField1D(grid, n * cumulative_from_center(
            direct[-1].samples * weight[sign], grid.step, scheme=scheme)))
        tilde.append(ComplexField1D(grid, n * cumulative_from_center(
            tilde[-1].samples * weight[-sign], grid.step, scheme=scheme)))
    return XSystems(direct, tilde)


def function_system_from(f: ComplexField1D, xs: XSystems,
                         variant: str = "phi") -> list[ComplexField1D]:
    fs = f.samples
    out = []
    for k in range(xs.n_max + 1):
        odd = k % 2 == 1
        if variant == "phi":
            base = xs.direct[k] if odd else xs.tilde[k]
            out.append(ComplexField1D(f.grid, fs * base.samples))
        elif variant == "phi_tilde":
            base = xs.tilde[k] if odd else xs.direct[k]
            out.append(ComplexField1D(f.grid, base.samples / fs))
        else:
            raise ValueError(f"variant must be 'phi' or 'phi_tilde', not {variant!r}")
    return out


def build_function_system(f: ComplexField1D, n_max: int, variant: str = "phi",
                          eps_f: float = 1e-12,
                          scheme: str = "poly5") -> list[ComplexField1D]:
    """``[phi_0, ..., phi_n_max]`` (or the reciprocal ``phi~`` system)."""
    return function_system_from(f, build_x_systems(f, n_max, eps_f, scheme),
                                variant)
