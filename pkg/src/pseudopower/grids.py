"""Symmetric uniform grids, sampled fields and finite-difference Wirtinger
operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bicomplex import BicomplexArray
from .errors import GridMismatch, GridTooSmall


@dataclass(frozen=True)
class SymmetricGrid1D:
    """Uniform grid ``x_j = -a + j*h`` on ``[-a, a]`` with an odd node count.

    The middle node is exactly zero and the node set is closed under
    ``x -> -x``.
    """

    half_width: float
    point_count: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.point_count < 3 or self.point_count % 2 == 0:
            raise GridTooSmall(
                f"point_count must be odd and >= 3, got {self.point_count}")

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / (self.point_count - 1)

    @property
    def center(self) -> int:
        return (self.point_count - 1) // 2

    @property
    def nodes(self) -> np.ndarray:
        m = self.center
        # built from integer offsets so that nodes are exactly antisymmetric
        return np.arange(-m, m + 1) * self.step

    def index_of(self, value: float, tol: float = 1e-9) -> int:
        """Index of the node equal to ``value`` (within ``tol*h``)."""
        j = int(round(value / self.step)) + self.center
        if not 0 <= j < self.point_count or \
                abs(j - self.center - value / self.step) > tol:
            raise KeyError(value)
        return j

    def refined(self) -> "SymmetricGrid1D":
        """Grid with the step halved (``N -> 2N - 1``)."""
        return SymmetricGrid1D(self.half_width, 2 * self.point_count - 1)


@dataclass(frozen=True)
class Grid2D:
    x_grid: SymmetricGrid1D
    y_grid: SymmetricGrid1D

    @classmethod
    def square(cls, a: float, n: int, b: float | None = None,
               ny: int | None = None) -> "Grid2D":
        return cls(SymmetricGrid1D(a, n),
                   SymmetricGrid1D(a if b is None else b, n if ny is None else ny))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x_grid.point_count, self.y_grid.point_count)

    @property
    def center(self) -> tuple[int, int]:
        return (self.x_grid.center, self.y_grid.center)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(X, Y)`` arrays indexed ``[j, l]`` (x index first)."""
        return np.meshgrid(self.x_grid.nodes, self.y_grid.nodes, indexing="ij")

    def z(self) -> BicomplexArray:
        """The bicomplex variable ``z = x + k y`` sampled on the grid."""
        X, Y = self.mesh()
        return BicomplexArray(X, Y)

    def refined(self) -> "Grid2D":
        return Grid2D(self.x_grid.refined(), self.y_grid.refined())


@dataclass
class ComplexField1D:
    grid: SymmetricGrid1D
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.point_count,):
            raise GridMismatch(
                f"{self.samples.shape[0]} samples for "
                f"{self.grid.point_count} nodes")

    @property
    def at_center(self) -> complex:
        return complex(self.samples[self.grid.center])


@dataclass
class BicomplexField2D:
    grid: Grid2D
    values: BicomplexArray = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.values, BicomplexArray):
            self.values = BicomplexArray(self.values)
        if self.values.shape != self.grid.shape:
            raise GridMismatch(
                f"field shape {self.values.shape} != grid {self.grid.shape}")

    @classmethod
    def from_function(cls, grid: Grid2D, func) -> "BicomplexField2D":
        """Sample ``func(z)`` where ``z`` is the :class:`BicomplexArray` of
        ``x + k y``."""
        return cls(grid, func(grid.z()))

    @property
    def u(self) -> np.ndarray:
        return self.values.u

    @property
    def v(self) -> np.ndarray:
        return self.values.v

    def at_center(self):
        return self.values[self.grid.center]

    def _check(self, other):
        if isinstance(other, BicomplexField2D):
            if other.grid != self.grid:
                raise GridMismatch("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return BicomplexField2D(self.grid, self.values + self._check(other))

    __radd__ = __add__

    def __sub__(self, other):
        return BicomplexField2D(self.grid, self.values - self._check(other))

    def __rsub__(self, other):
        return BicomplexField2D(self.grid, self._check(other) - self.values)

    def __mul__(self, other):
        return BicomplexField2D(self.grid, self.values * self._check(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return BicomplexField2D(self.grid, self.values / self._check(other))

    def __rtruediv__(self, other):
        return BicomplexField2D(self.grid, self._check(other) / self.values)

    def __neg__(self):
        return BicomplexField2D(self.grid, -self.values)

    def conj(self) -> "BicomplexField2D":
        return BicomplexField2D(self.grid, self.values.conj())

    def norm(self) -> float:
        return self.values.norm()


# one-sided fourth-order stencils for the first two nodes
_EDGE4 = (np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12,
          np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12)


def _partial4(arr: np.ndarray, step: float, axis: int) -> np.ndarray:
    a = np.moveaxis(np.asarray(arr), axis, 0)
    out = np.empty(a.shape, dtype=np.result_type(a, float))
    out[2:-2] = (-a[4:] + 8 * a[3:-1] - 8 * a[1:-3] + a[:-4]) / 12
    rev = a[::-1]
    for j, c in enumerate(_EDGE4):
        out[j] = np.tensordot(c, a[:5], 1)
        out[-1 - j] = -np.tensordot(c, rev[:5], 1)
    return np.moveaxis(out / step, 0, axis)


def partial(arr: np.ndarray, step: float, axis: int, order: int = 2) -> np.ndarray:
    """First derivative along ``axis``.

    ``order=2``: central in the interior, one-sided second order at the
    ends.  ``order=4``: five-point stencils throughout (needs 5 points).
    """
    if order == 4:
        if arr.shape[axis] < 5:
            raise GridTooSmall("fourth-order differences need at least 5 points per axis")
        return _partial4(arr, step, axis)
    if order != 2:
        raise ValueError(f"order must be 2 or 4, not {order!r}")
    if arr.shape[axis] < 3:
        raise GridTooSmall("need at least 3 points per axis")
    return np.gradient(arr, step, axis=axis, edge_order=2)


def wirtinger_fd(W: BicomplexField2D, which: str = "dbar", order: int = 2) -> BicomplexField2D:
    """``dbar = (d/dx + k d/dy)/2`` or ``d = (d/dx - k d/dy)/2`` by finite
    differences of the given order."""
    hx, hy = W.grid.x_grid.step, W.grid.y_grid.step
    ux, vx = partial(W.u, hx, 0, order), partial(W.v, hx, 0, order)
    uy, vy = partial(W.u, hy, 1, order), partial(W.v, hy, 1, order)
    if which == "dbar":
        values = BicomplexArray(0.5 * (ux - vy), 0.5 * (vx + uy))
    elif which == "d":
        values = BicomplexArray(0.5 * (ux + vy), 0.5 * (vx - uy))
    else:
        raise ValueError(f"which must be 'dbar' or 'd', not {which!r}")
    return BicomplexField2D(W.grid, values)
