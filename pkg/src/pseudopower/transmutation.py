"""Transmutation operators built from Goursat kernels.

The kernel ``K(x, t)`` of the Goursat problem

    (d²/dx² - q(x)) K = d²/dt² K,   K(x, x) = ½∫_0^x q,   K(x, -x) = 0

is computed in characteristic coordinates ``u = (x+t)/2``, ``v = (x-t)/2``
where it becomes the integral equation

    H(u, v) = ½∫_0^u q + ∫_0^u ∫_0^v q(α+β) H(α, β) dβ dα,

solved by Picard iteration on a half-step lattice (every ``(x_j, t_l)``
node is a lattice point).  Nodes with ``x < 0`` use the reflection
``K(-ξ, -τ) = -K[q(-·)](ξ, τ)``.

Discrete operators are dense ``N x N`` matrices acting on samples; 2-D
operators act fibrewise (x rows, then y columns).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline

from .bicomplex import BicomplexArray
from .errors import GridMismatch, NoConvergence, SingularStep, VanishingGenerator
from .grids import BicomplexField2D, ComplexField1D, SymmetricGrid1D, partial
from .quadrature import cumulative_from_center, cumulative_from_start


@dataclass
class TriangularKernel:
    """``K(x_j, t_l)`` on ``|t| <= |x|``, zero elsewhere.

    ``values[j, l]`` uses the same grid for both indices; ``dt`` holds
    ``∂K/∂t`` at the same nodes.
    """

    grid: SymmetricGrid1D
    values: np.ndarray = field(repr=False)
    dt: np.ndarray = field(repr=False)
    iterations: int = 0
    last_change: float = 0.0

    def mask(self) -> np.ndarray:
        return triangle_mask(self.grid.point_count)


@dataclass
class DressedKernel:
    base: TriangularKernel
    slope: complex
    values: np.ndarray = field(repr=False)
    dt: np.ndarray = field(repr=False)

    @property
    def grid(self) -> SymmetricGrid1D:
        return self.base.grid


def triangle_mask(n: int) -> np.ndarray:
    c = n // 2
    off = np.abs(np.arange(n) - c)
    return off[None, :] <= off[:, None]


def _half_step_samples(q_side: np.ndarray, step: float) -> np.ndarray:
    """Values of ``q`` at ``s = k*step/2`` for ``k = 0..4M`` (``s`` in
    ``[0, 2a]``); the part beyond ``a`` is a smooth cubic extrapolation that
    only feeds finite differences at the triangle edge."""
    m = q_side.shape[0] - 1
    s_nodes = np.arange(m + 1) * step
    s_half = np.arange(4 * m + 1) * (step / 2)
    if m < 3:
        out = np.polyval(np.polyfit(s_nodes, q_side, m), s_half)
    else:
        out = CubicSpline(s_nodes, q_side, extrapolate=True)(s_half)
    out[: 2 * m + 1: 2] = q_side
    return out


def _goursat_side(q_side: np.ndarray, step: float, tol: float, max_iter: int,
                  scheme: str):
    """Solve the characteristic integral equation for ``x >= 0``.

    Returns ``K`` and ``∂K/∂t`` on rows ``j = 0..M`` (``x = j*h``) and
    columns ``l = -M..M`` (``t = l*h``), plus iteration diagnostics.
    """
    m = q_side.shape[0] - 1
    real = np.isrealobj(q_side) or not np.any(np.imag(q_side))
    dtype = float if real else complex
    q_side = q_side.real.astype(float) if real else q_side.astype(complex)
    hh = step / 2
    qh = _half_step_samples(q_side, step)
    if real:
        qh = np.real(qh)
    size = 2 * m + 1
    idx = np.arange(size)
    Q = qh[idx[:, None] + idx[None, :]].astype(dtype)
    # boundary data ½∫_0^u q, constant along v
    half_int = 0.5 * cumulative_from_start(qh[:size], hh, scheme=scheme)
    H = np.repeat(half_int[:, None], size, axis=1).astype(dtype)
    D = H.copy()
    inside = (idx[:, None] + idx[None, :]) <= 2 * m
    change = np.inf
    it = 0
    while it < max_iter:
        it += 1
        D *= Q
        D = cumulative_from_start(D, hh, axis=0, scheme=scheme, causal=True)
        D = cumulative_from_start(D, hh, axis=1, scheme=scheme, causal=True)
        H += D
        change = float(np.max(np.abs(D[inside]))) if size > 1 else 0.0
        if change < tol:
            break
    if change >= tol:
        raise NoConvergence(
            f"Picard iteration stopped after {it} steps with change {change:.3e}")
    del D, Q
    Hu = partial(H, hh, 0) if size >= 3 else np.zeros_like(H)
    Hv = partial(H, hh, 1) if size >= 3 else np.zeros_like(H)
    j = np.arange(m + 1)[:, None]
    l = np.arange(-m, m + 1)[None, :]
    ok = np.abs(l) <= j
    ui = np.where(ok, j + l, 0)
    vi = np.where(ok, j - l, 0)
    K = np.where(ok, H[ui, vi], 0)
    Kt = np.where(ok, 0.5 * (Hu[ui, vi] - Hv[ui, vi]), 0)
    return K, Kt, it, change


def goursat_kernel(q: ComplexField1D, tol: float = 1e-12, max_iter: int = 50,
                   scheme: str = "trapezoid") -> TriangularKernel:
    """Transmutation kernel ``K`` for the potential ``q`` on a symmetric grid.

    Picard iteration stops when the sup-norm of the increment falls below
    ``tol``; :class:`NoConvergence` is raised if ``max_iter`` is reached
    first.
    """
    grid = q.grid
    n, c, h = grid.point_count, grid.center, grid.step
    samples = q.samples
    if not np.any(np.imag(samples)):
        samples = samples.real
    Kp, Ktp, it_p, ch_p = _goursat_side(samples[c:], h, tol, max_iter, scheme)
    Kn, Ktn, it_n, ch_n = _goursat_side(samples[c::-1], h, tol, max_iter, scheme)
    dtype = np.result_type(Kp, Kn)
    K = np.zeros((n, n), dtype=dtype)
    Kt = np.zeros((n, n), dtype=dtype)
    K[c:, :] = Kp
    Kt[c:, :] = Ktp
    # K(-ξ, -τ) = -G(ξ, τ); ∂_t K(-ξ, -τ) = +G_τ(ξ, τ)
    K[c::-1, :] = -Kn[:, ::-1]
    Kt[c::-1, :] = Ktn[:, ::-1]
    return TriangularKernel(grid, K, Kt, max(it_p, it_n), max(ch_p, ch_n))


def dress_kernel(kernel: TriangularKernel, slope: complex) -> DressedKernel:
    """``𝐊(x,t) = c/2 + K(x,t) + (c/2)∫_t^x [K(x,s) - K(x,-s)] ds``."""
    grid = kernel.grid
    h = grid.step
    K = kernel.values
    mask = kernel.mask()
    odd_part = K - K[:, ::-1]
    S = cumulative_from_center(odd_part, h, axis=1, scheme="trapezoid")
    S_diag = np.diagonal(S)[:, None]
    half = 0.5 * slope
    values = np.where(mask, half + K + half * (S_diag - S), 0)
    dt = np.where(mask, kernel.dt - half * odd_part, 0)
    return DressedKernel(kernel, complex(slope), values, dt)


def volterra_weights(grid: SymmetricGrid1D) -> np.ndarray:
    """Signed trapezoid weights for ``∫_{-x_j}^{x_j} (.) dt`` on node ``t_l``."""
    n, c, h = grid.point_count, grid.center, grid.step
    off = np.arange(n) - c
    ax, at = np.abs(off)[:, None], np.abs(off)[None, :]
    w = np.where(at < ax, h, np.where(at == ax, 0.5 * h, 0.0))
    w[c, :] = 0.0
    return w * np.sign(off)[:, None]


class Transmutation:
    """A discrete Volterra-type operator ``u -> M u`` on one axis."""

    def __init__(self, grid: SymmetricGrid1D, matrix: np.ndarray,
                 name: str = "T"):
        self.grid = grid
        self.matrix = matrix
        self.name = name
        self._lu = None

    def __repr__(self):
        return f"Transmutation({self.name}, N={self.grid.point_count})"

    def _check(self, n):
        if n != self.grid.point_count:
            raise GridMismatch(
                f"{self.name} acts on {self.grid.point_count} nodes, got {n}")

    def apply(self, u, axis: int = 0) -> np.ndarray:
        u = np.asarray(u)
        self._check(u.shape[axis])
        moved = np.moveaxis(u, axis, 0)
        out = np.tensordot(self.matrix, moved, axes=(1, 0))
        return np.moveaxis(out, 0, axis)

    def __call__(self, u: ComplexField1D) -> ComplexField1D:
        if u.grid != self.grid:
            raise GridMismatch("field and operator grids differ")
        return ComplexField1D(self.grid, self.apply(u.samples))

    def lu(self):
        if self._lu is None:
            with warnings.catch_warnings():
                # exact zero pivots are reported below as SingularStep
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(self.matrix, check_finite=False)
            pivots = np.abs(np.diagonal(lu))
            if np.min(pivots) < 1e-12:
                raise SingularStep(
                    f"{self.name}: pivot {np.min(pivots):.3e} at node "
                    f"{int(np.argmin(pivots))}")
            self._lu = (lu, piv)
        return self._lu

    def solve(self, v, axis: int = 0) -> np.ndarray:
        v = np.asarray(v)
        self._check(v.shape[axis])
        moved = np.moveaxis(v, axis, 0)
        shape = moved.shape
        flat = moved.reshape(shape[0], -1).astype(complex)
        out = scipy.linalg.lu_solve(self.lu(), flat, check_finite=False)
        return np.moveaxis(out.reshape(shape), 0, axis)

    def inverse_norm_bound(self) -> float:
        """Max-row-sum norm of the discrete operator."""
        return float(np.max(np.sum(np.abs(self.matrix), axis=1)))


def transmutation_matrix(kernel: DressedKernel) -> np.ndarray:
    n = kernel.grid.point_count
    return np.eye(n, dtype=complex) + volterra_weights(kernel.grid) * kernel.values


def apply_transmutation(kernel: DressedKernel, u: ComplexField1D) -> ComplexField1D:
    """``(T u)(x) = u(x) + ∫_{-x}^{x} 𝐊(x,t) u(t) dt`` (signed for x < 0)."""
    if u.grid != kernel.grid:
        raise GridMismatch("field and kernel grids differ")
    out = u.samples + (volterra_weights(kernel.grid) * kernel.values) @ u.samples
    return ComplexField1D(u.grid, out)


def recip_transmutation_matrix(f: ComplexField1D, kernel: DressedKernel,
                               df: np.ndarray | None = None) -> np.ndarray:
    """Matrix of ``T_{1/f}``.

    Starts from ``T_{1/f}u = (1/f)(∫_0^x f T_f[u'] + u(0))`` and integrates by
    parts in both ``t`` and ``η`` so that no derivative of ``u`` is needed:

        T_{1/f}u(x) = u(x) + (1/f(x)) ∫_0^x r(η) dη,
        r(η) = (f𝐊(η,η) - f'(η)) u(η) - f(η)𝐊(η,-η) u(-η)
               - f(η) ∫_{-η}^{η} ∂_t𝐊(η,t) u(t) dt.
    """
    grid = kernel.grid
    fs = f.samples
    if np.min(np.abs(fs)) < 1e-12:
        raise VanishingGenerator("f vanishes on the grid")
    if df is None:
        df = partial(fs, grid.step, 0)
    n = grid.point_count
    rows = np.arange(n)
    A = -(fs[:, None] * volterra_weights(grid)) * kernel.dt
    A = A.astype(complex)
    diag = np.diagonal(kernel.values)
    anti = kernel.values[rows, rows[::-1]]
    A[rows, rows] += fs * diag - df
    A[rows, rows[::-1]] -= fs * anti
    integrated = cumulative_from_center(A, grid.step, axis=0, scheme="trapezoid")
    return np.eye(n, dtype=complex) + integrated / fs[:, None]


def apply_recip_transmutation(f: ComplexField1D, T_f, u: ComplexField1D,
                              df: np.ndarray | None = None,
                              method: str = "parts") -> ComplexField1D:
    """Apply ``T_{1/f}`` to ``u``.

    ``method="parts"`` uses the integrated-by-parts matrix (the default, no
    differentiation of ``u``); ``method="derivative"`` evaluates the defining
    formula literally with ``u'`` from second-order finite differences.
    ``T_f`` is a :class:`DressedKernel` or :class:`Transmutation`.
    """
    if method == "parts":
        if not isinstance(T_f, DressedKernel):
            raise TypeError("method='parts' needs the dressed kernel of T_f")
        M = recip_transmutation_matrix(f, T_f, df)
        return ComplexField1D(u.grid, M @ u.samples)
    if method != "derivative":
        raise ValueError(f"unknown method {method!r}")
    fs = f.samples
    if np.min(np.abs(fs)) < 1e-12:
        raise VanishingGenerator("f vanishes on the grid")
    du = ComplexField1D(u.grid, partial(u.samples, u.grid.step, 0))
    Tdu = T_f(du) if isinstance(T_f, Transmutation) else apply_transmutation(T_f, du)
    inner = cumulative_from_center(fs * Tdu.samples, u.grid.step)
    return ComplexField1D(u.grid, (inner + u.at_center) / fs)


def invert_transmutation(op, v: ComplexField1D) -> ComplexField1D:
    """Solve ``(I + 𝒦) u = v`` for a :class:`Transmutation` or dressed kernel."""
    if isinstance(op, DressedKernel):
        op = Transmutation(op.grid, transmutation_matrix(op))
    return ComplexField1D(v.grid, op.solve(v.samples))


@dataclass
class OperatorSet:
    """The four one-dimensional operators ``T_f, T_g, T_{1/f}, T_{1/g}``."""

    Tf: Transmutation
    Tg: Transmutation
    T1f: Transmutation
    T1g: Transmutation
    kernel_f: DressedKernel | None = None
    kernel_g: DressedKernel | None = None

    @classmethod
    def build(cls, f: ComplexField1D, g: ComplexField1D, q: ComplexField1D,
              q_tilde: ComplexField1D, df=None, dg=None, tol: float = 1e-12,
              max_iter: int = 50) -> "OperatorSet":
        kf = dress_kernel(goursat_kernel(q, tol, max_iter), _slope(f, df))
        kg = dress_kernel(goursat_kernel(q_tilde, tol, max_iter), _slope(g, dg))
        return cls(
            Transmutation(f.grid, transmutation_matrix(kf), "T_f"),
            Transmutation(g.grid, transmutation_matrix(kg), "T_g"),
            Transmutation(f.grid, recip_transmutation_matrix(f, kf, df), "T_1/f"),
            Transmutation(g.grid, recip_transmutation_matrix(g, kg, dg), "T_1/g"),
            kf, kg)

    def _apply2(self, Ax: Transmutation, Ay: Transmutation, arr, inverse=False):
        if inverse:
            return Ay.solve(Ax.solve(arr, axis=0), axis=1)
        # x fibres first, then y fibres
        return Ay.apply(Ax.apply(arr, axis=0), axis=1)

    def _check_grid(self, W: BicomplexField2D):
        if W.grid.shape != (self.Tf.grid.point_count, self.Tg.grid.point_count):
            raise GridMismatch("field grid does not match the operators")

    def T0(self, W: BicomplexField2D) -> BicomplexField2D:
        """``T_f T_g Sc W + k T_{1/f} T_{1/g} Vec W``."""
        self._check_grid(W)
        return BicomplexField2D(W.grid, BicomplexArray(
            self._apply2(self.Tf, self.Tg, W.u),
            self._apply2(self.T1f, self.T1g, W.v)))

    def T1(self, W: BicomplexField2D) -> BicomplexField2D:
        """``T_{1/f} T_g Sc W + k T_f T_{1/g} Vec W``."""
        self._check_grid(W)
        return BicomplexField2D(W.grid, BicomplexArray(
            self._apply2(self.T1f, self.Tg, W.u),
            self._apply2(self.Tf, self.T1g, W.v)))

    def T0_inverse(self, W: BicomplexField2D) -> BicomplexField2D:
        self._check_grid(W)
        return BicomplexField2D(W.grid, BicomplexArray(
            self._apply2(self.Tf, self.Tg, W.u, inverse=True),
            self._apply2(self.T1f, self.T1g, W.v, inverse=True)))

    def T1_inverse(self, W: BicomplexField2D) -> BicomplexField2D:
        self._check_grid(W)
        return BicomplexField2D(W.grid, BicomplexArray(
            self._apply2(self.T1f, self.Tg, W.u, inverse=True),
            self._apply2(self.Tf, self.T1g, W.v, inverse=True)))


def _slope(f: ComplexField1D, df) -> complex:
    if df is not None:
        return complex(np.asarray(df)[f.grid.center])
    return complex(partial(f.samples, f.grid.step, 0)[f.grid.center])


def apply_T0(W: BicomplexField2D, ops: OperatorSet) -> BicomplexField2D:
    return ops.T0(W)


def apply_T1(W: BicomplexField2D, ops: OperatorSet) -> BicomplexField2D:
    return ops.T1(W)
