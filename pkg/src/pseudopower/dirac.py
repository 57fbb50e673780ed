"""Physical data of the Dirac problem and the Schrödinger/Vekua links.

With scalar potential ``p(x)``, mass ``m`` and energy ``omega`` the
bicomplex main Vekua equation ``dbar W = (dbar phi / phi) conj(W)`` has

    phi(x, y) = f(x) g(y),   f = exp(P(x) + m x),   g = exp(i omega y),

``P = ∫_0^x p``.  ``Sc W`` solves ``(-Δ + nu) u = 0`` and ``Vec W`` solves
``(-Δ + mu) v = 0`` with ``nu = p' + (p+m)² - omega²`` and
``mu = -p' + (p+m)² - omega²``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bicomplex import BicomplexArray
from .errors import DerivativeMissing, NonRealPotential, NotCompatible
from .grids import BicomplexField2D, ComplexField1D, Grid2D, partial, wirtinger_fd
from .quadrature import cumulative_from_center

POTENTIAL_KINDS = ("zero", "constant", "linear", "polynomial", "sine", "table")


@dataclass
class PotentialSpec:
    """Scalar potential catalog entry plus mass, energy and domain.

    ``params`` by kind: ``constant`` -> ``(c,)``; ``linear`` -> ``(c,)`` for
    ``p = c x``; ``polynomial`` -> coefficients ``(c0, c1, ...)`` of
    ``Σ c_k x^k``; ``sine`` -> ``(amplitude, frequency)`` for
    ``A sin(ω x)``.  ``table`` uses ``table`` and ``table_derivative``
    sampled on the x-grid.
    """

    kind: str
    params: tuple = ()
    m: float = 0.0
    omega: float = 0.0
    domain: Grid2D | None = None
    table: np.ndarray | None = field(default=None, repr=False)
    table_derivative: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        self.params = tuple(float(c) for c in self.params)

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(p(x), p'(x))`` for the analytic kinds."""
        x = np.asarray(x, dtype=float)
        zero = np.zeros_like(x)
        kind, c = self.kind, self.params
        if kind == "zero":
            return zero, zero.copy()
        if kind == "constant":
            return zero + c[0], zero.copy()
        if kind == "linear":
            return c[0] * x, zero + c[0]
        if kind == "polynomial":
            poly = np.polynomial.Polynomial(c or (0.0,))
            return poly(x), poly.deriv()(x)
        if kind == "sine":
            amp, freq = c
            return amp * np.sin(freq * x), amp * freq * np.cos(freq * x)
        raise ValueError("table potentials have no closed form")

    def samples(self, grid) -> tuple[np.ndarray, np.ndarray]:
        if self.kind != "table":
            return self.evaluate(grid.nodes)
        table = np.asarray(self.table)
        if np.iscomplexobj(table) and np.any(np.imag(table) != 0):
            raise NonRealPotential("tabulated potential has an imaginary part")
        if self.table_derivative is None:
            raise DerivativeMissing("table potentials must supply p'")
        return np.real(table).astype(float), \
            np.real(np.asarray(self.table_derivative)).astype(float)


@dataclass
class PotentialData:
    grid: Grid2D
    p: np.ndarray
    dp: np.ndarray
    f: ComplexField1D
    g: ComplexField1D
    df: np.ndarray
    dg: np.ndarray
    phi: BicomplexField2D
    q: ComplexField1D
    q_tilde: ComplexField1D
    nu: ComplexField1D
    mu: ComplexField1D
    m: float = 0.0
    omega: float = 0.0

    def dbar_log_phi(self) -> BicomplexField2D:
        """``dbar phi / phi = ((p+m) + k i omega) / 2`` (exact)."""
        u = np.broadcast_to(0.5 * (self.p + self.m)[:, None], self.grid.shape)
        v = np.full(self.grid.shape, 0.5j * self.omega)
        return BicomplexField2D(self.grid, BicomplexArray(u, v))

    def d_log_phi(self) -> BicomplexField2D:
        """``d phi / phi = ((p+m) - k i omega) / 2`` (exact)."""
        u = np.broadcast_to(0.5 * (self.p + self.m)[:, None], self.grid.shape)
        v = np.full(self.grid.shape, -0.5j * self.omega)
        return BicomplexField2D(self.grid, BicomplexArray(u, v))


def derive_potential_data(spec: PotentialSpec, grid: Grid2D | None = None) -> PotentialData:
    grid = grid or spec.domain
    if grid is None:
        raise ValueError("a domain grid is required")
    xg, yg = grid.x_grid, grid.y_grid
    x, y = xg.nodes, yg.nodes
    p, dp = spec.samples(xg)
    m, omega = float(spec.m), float(spec.omega)
    P = cumulative_from_center(p, xg.step)
    f = np.exp(P + m * x).astype(complex)
    g = np.exp(1j * omega * y)
    df = (p + m) * f
    dg = 1j * omega * g
    q = dp + (p + m) ** 2
    q_tilde = np.full(y.shape, -omega ** 2, dtype=complex)
    nu = dp + (p + m) ** 2 - omega ** 2
    mu = -dp + (p + m) ** 2 - omega ** 2
    phi = BicomplexField2D(grid, BicomplexArray(np.outer(f, g)))
    return PotentialData(
        grid=grid, p=p, dp=dp,
        f=ComplexField1D(xg, f), g=ComplexField1D(yg, g), df=df, dg=dg,
        phi=phi, q=ComplexField1D(xg, q), q_tilde=ComplexField1D(yg, q_tilde),
        nu=ComplexField1D(xg, nu), mu=ComplexField1D(xg, mu), m=m, omega=omega)


def _interior(arr: np.ndarray) -> np.ndarray:
    return arr[1:-1, 1:-1]


def compatibility_defect(w: BicomplexField2D) -> np.ndarray:
    """``∂w1/∂y - ∂w2/∂x`` at least two nodes away from the boundary.

    Inputs are usually finite-difference derivatives themselves, which are
    only first-order accurate once differenced again next to the edge.
    """
    hx, hy = w.grid.x_grid.step, w.grid.y_grid.step
    return (partial(w.u, hy, 1) - partial(w.v, hx, 0))[2:-2, 2:-2]


def default_compat_tol(w: BicomplexField2D) -> float:
    h = max(w.grid.x_grid.step, w.grid.y_grid.step)
    return max(1e-6, 10.0 * h * h) * max(w.norm(), 1e-300)


def abar(w: BicomplexField2D, endpoint: tuple[int, int] | None = None,
         tol: float | None = None, order: str = "xy"):
    """``Ā w = 2 ∫_Γ (w1 dx + w2 dy)`` from the origin along an L-shaped path.

    ``order="xy"`` runs along the x-axis first, then vertically;
    ``order="yx"`` the other way round.  Returns the whole field (complex
    array) or, given ``endpoint=(j, l)``, its value there.
    """
    defect = np.max(np.abs(compatibility_defect(w)), initial=0.0)
    tol = default_compat_tol(w) if tol is None else tol
    if defect > tol:
        raise NotCompatible(
            f"compatibility defect {defect:.3e} exceeds {tol:.3e}")
    hx, hy = w.grid.x_grid.step, w.grid.y_grid.step
    cx, cy = w.grid.center
    if order == "xy":
        leg1 = cumulative_from_center(w.u[:, cy], hx)[:, None]
        leg2 = cumulative_from_center(w.v, hy, axis=1)
    elif order == "yx":
        leg1 = cumulative_from_center(w.v[cx, :], hy)[None, :]
        leg2 = cumulative_from_center(w.u, hx, axis=0)
    else:
        raise ValueError(f"order must be 'xy' or 'yx', not {order!r}")
    field_ = 2.0 * (leg1 + leg2)
    if endpoint is None:
        return field_
    return complex(field_[endpoint])


def _scalar(phi) -> np.ndarray:
    if isinstance(phi, BicomplexField2D):
        return phi.u
    return np.asarray(phi)


def schrodinger_residual(u: np.ndarray, potential, grid: Grid2D) -> float:
    """``max |-Δu + V u|`` over interior nodes with the 5-point Laplacian.

    ``potential`` is a :class:`ComplexField1D` in ``x`` or a 2-D array.
    """
    hx, hy = grid.x_grid.step, grid.y_grid.step
    u = np.asarray(u)
    V = potential.samples[:, None] if isinstance(potential, ComplexField1D) \
        else np.asarray(potential)
    V = np.broadcast_to(V, u.shape)
    lap = (u[2:, 1:-1] - 2 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / hx ** 2 \
        + (u[1:-1, 2:] - 2 * u[1:-1, 1:-1] + u[1:-1, :-2]) / hy ** 2
    return float(np.max(np.abs(-lap + V[1:-1, 1:-1] * u[1:-1, 1:-1])))


def vekua_residual(W: BicomplexField2D, a_coef=None, b_coef=None,
                   interior: bool = True) -> float:
    """``max |dbar W - a W - b conj(W)|`` (interior nodes by default)."""
    r = wirtinger_fd(W, "dbar").values
    if a_coef is not None:
        r = r - _values(a_coef) * W.values
    if b_coef is not None:
        r = r - _values(b_coef) * W.values.conj()
    mag = np.abs(r.u) + np.abs(r.v)
    if interior:
        mag = _interior(mag)
    return float(np.max(mag))


def _values(coef):
    return coef.values if isinstance(coef, BicomplexField2D) else coef


def _warn_if_not_solution(W1, nu, grid):
    if nu is None:
        return
    h = max(grid.x_grid.step, grid.y_grid.step)
    res = schrodinger_residual(W1, nu, grid)
    scale = max(float(np.max(np.abs(W1))), 1e-300)
    if res > 1e3 * h * h * scale:
        warnings.warn(f"input has Schrödinger residual {res:.3e}; "
                      "the transfer formula assumes an exact solution")


def transfer_W1_to_W2(W1: np.ndarray, phi: BicomplexField2D, c1: complex = 0.0,
                      nu: ComplexField1D | None = None,
                      tol: float | None = None) -> np.ndarray:
    """``W2 = Ā(k phi² dbar(W1/phi)) / phi + c1/phi``.

    The inner derivative uses fourth-order differences so that the error
    of the result stays smooth up to the boundary.
    """
    grid = phi.grid
    _warn_if_not_solution(W1, nu, grid)
    ph = _scalar(phi)
    s = BicomplexField2D(grid, BicomplexArray(np.asarray(W1) / ph))
    ds = wirtinger_fd(s, "dbar", order=4).values
    # k * (a + k b) = -b + k a
    w = BicomplexArray(-ph ** 2 * ds.v, ph ** 2 * ds.u)
    return abar(BicomplexField2D(grid, w), tol=tol) / ph + c1 / ph


def transfer_W2_to_W1(W2: np.ndarray, phi: BicomplexField2D, c2: complex = 0.0,
                      mu: ComplexField1D | None = None,
                      tol: float | None = None) -> np.ndarray:
    """``W1 = -phi Ā((k/phi²) dbar(phi W2)) + c2 phi``."""
    grid = phi.grid
    _warn_if_not_solution(W2, mu, grid)
    ph = _scalar(phi)
    s = BicomplexField2D(grid, BicomplexArray(ph * np.asarray(W2)))
    ds = wirtinger_fd(s, "dbar", order=4).values
    w = BicomplexArray(-ds.v / ph ** 2, ds.u / ph ** 2)
    return -ph * abar(BicomplexField2D(grid, w), tol=tol) + c2 * ph
