"""Generating pairs, (F,G)-calculus and formal powers.

The main Vekua equation ``dbar W = (dbar phi/phi) conj(W)`` with separable
``phi = f(x) g(y)`` is embedded in the period-two generating sequence

    (F0, G0) = (phi, k/phi),   (F1, G1) = (phi/f², k f²/phi) = (g/f, k f/g).

Formal powers centred at the origin are produced two independent ways:
the closed form in terms of the X/Y systems (:func:`formal_power_closed`)
and Bers' integral recursion (:func:`formal_power_recursive`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .bicomplex import Bicomplex, BicomplexArray, K, k_power
from .errors import DegeneratePair, DegreeOutOfRange, PathOffGrid
from .grids import BicomplexField2D, Grid2D, wirtinger_fd
from .quadrature import cumulative_from_center, cumulative_from_start
from .systems import XSystems, build_x_systems

DEGENERACY_EPS = 1e-10


def _pair_denominator(F: BicomplexField2D, G: BicomplexField2D,
                      eps: float = DEGENERACY_EPS) -> BicomplexField2D:
    """``F conj(G) - conj(F) G = -2k Vec(conj(F) G)``, checked nonzero."""
    vec = (F.conj() * G).v
    worst = float(np.min(np.abs(vec)))
    if worst < eps:
        raise DegeneratePair(f"|Vec(conj(F) G)| reaches {worst:.3e}")
    return F * G.conj() - F.conj() * G


def characteristic_coefficients(F: BicomplexField2D, G: BicomplexField2D,
                                eps: float = DEGENERACY_EPS):
    """``(a, b, A, B)`` of the pair ``(F, G)`` with finite-difference
    Wirtinger derivatives."""
    den = _pair_denominator(F, G, eps).values.inverse()
    Fb, Gb = F.conj().values, G.conj().values
    dbF, dbG = wirtinger_fd(F, "dbar").values, wirtinger_fd(G, "dbar").values
    dF, dG = wirtinger_fd(F, "d").values, wirtinger_fd(G, "d").values
    Fv, Gv = F.values, G.values
    grid = F.grid
    a = -(Fb * dbG - Gb * dbF) * den
    b = (Fv * dbG - Gv * dbF) * den
    A = -(Fb * dG - Gb * dF) * den
    B = (Fv * dG - Gv * dF) * den
    return tuple(BicomplexField2D(grid, c) for c in (a, b, A, B))


@dataclass
class GeneratingPair:
    F: BicomplexField2D
    G: BicomplexField2D
    eps: float = DEGENERACY_EPS
    _coefficients: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        _pair_denominator(self.F, self.G, self.eps)

    @property
    def grid(self) -> Grid2D:
        return self.F.grid

    def coefficients(self):
        if self._coefficients is None:
            self._coefficients = characteristic_coefficients(self.F, self.G, self.eps)
        return self._coefficients

    @property
    def a(self):
        return self.coefficients()[0]

    @property
    def b(self):
        return self.coefficients()[1]

    @property
    def A(self):
        return self.coefficients()[2]

    @property
    def B(self):
        return self.coefficients()[3]

    def adjoint(self):
        return adjoint_pair(self)

    def decompose_at(self, index, value) -> tuple[complex, complex]:
        """Scalars ``(λ, μ)`` with ``λ F + μ G = value`` at grid node ``index``."""
        F0, G0 = self.F.values[index], self.G.values[index]
        w = Bicomplex.coerce(value)
        # two linear equations over C_i for the (u, v) components
        mat = np.array([[F0.u, G0.u], [F0.v, G0.v]])
        lam, mu = np.linalg.solve(mat, np.array([w.u, w.v]))
        return complex(lam), complex(mu)


def adjoint_pair(pair: GeneratingPair):
    """``F* = -2 conj(F)/(F conj(G) - conj(F) G)``, ``G* = 2 conj(G)/(...)``."""
    den = _pair_denominator(pair.F, pair.G, pair.eps)
    return (-2.0 * pair.F.conj() / den, 2.0 * pair.G.conj() / den)


def fg_derivative(W: BicomplexField2D, pair: GeneratingPair) -> BicomplexField2D:
    """``Ẇ = dW - A W - B conj(W)``."""
    _, _, A, B = pair.coefficients()
    dW = wirtinger_fd(W, "d")
    return dW - A * W - B * W.conj()


def _segment_integral(values: np.ndarray, step: float) -> np.ndarray:
    return cumulative_from_start(values, step)[-1]


def fg_integral(W: BicomplexField2D, pair: GeneratingPair, path) -> Bicomplex:
    """``∫_Γ W d_(F,G)z = F(z1) Sc∫G*W dz + G(z1) Sc∫F*W dz`` along a polyline.

    ``path`` is a sequence of ``(x, y)`` vertices on grid nodes, joined by
    axis-parallel segments.
    """
    grid = W.grid
    xg, yg = grid.x_grid, grid.y_grid
    try:
        nodes = [(xg.index_of(x), yg.index_of(y)) for x, y in path]
    except KeyError as exc:
        raise PathOffGrid(f"vertex coordinate {exc.args[0]} is not a node") from None
    if len(nodes) < 2:
        raise PathOffGrid("a path needs at least two vertices")
    Fs, Gs = adjoint_pair(pair)
    integrands = {"G*": (Gs * W).values, "F*": (Fs * W).values}
    totals = {key: [0j, 0j] for key in integrands}
    for (j0, l0), (j1, l1) in zip(nodes[:-1], nodes[1:]):
        if j0 != j1 and l0 != l1:
            raise PathOffGrid("segments must be parallel to an axis")
        if (j0, l0) == (j1, l1):
            continue
        if l0 == l1:
            direction = 1 if j1 > j0 else -1
            idx = np.arange(j0, j1 + direction, direction)
            for key, vals in integrands.items():
                totals[key][0] += _segment_integral(vals.u[idx, l0], direction * xg.step)
                totals[key][1] += _segment_integral(vals.v[idx, l0], direction * xg.step)
        else:
            direction = 1 if l1 > l0 else -1
            idx = np.arange(l0, l1 + direction, direction)
            for key, vals in integrands.items():
                su = _segment_integral(vals.u[j0, idx], direction * yg.step)
                sv = _segment_integral(vals.v[j0, idx], direction * yg.step)
                # dz = k dy:  k (su + k sv) = -sv + k su
                totals[key][0] += -sv
                totals[key][1] += su
    end = nodes[-1]
    F1, G1 = pair.F.values[end], pair.G.values[end]
    result = F1 * Bicomplex.from_uv(totals["G*"][0]) \
        + G1 * Bicomplex.from_uv(totals["F*"][0])
    return result


def _l_path_sc(values: BicomplexArray, grid: Grid2D, order: str) -> np.ndarray:
    """``Sc ∫_0^z values dz`` along L-shaped paths ending at every node."""
    hx, hy = grid.x_grid.step, grid.y_grid.step
    cx, cy = grid.center
    if order == "xy":
        # along x at y = 0, then up: Sc(I_x) + Sc(k I_y) = Sc(I_x) - Vec(I_y)
        leg_x = cumulative_from_center(values.u[:, cy], hx)[:, None]
        leg_y = cumulative_from_center(values.v, hy, axis=1)
        return leg_x - leg_y
    if order == "yx":
        leg_y = cumulative_from_center(values.v[cx, :], hy)[None, :]
        leg_x = cumulative_from_center(values.u, hx, axis=0)
        return leg_x - leg_y
    raise ValueError(f"order must be 'xy' or 'yx', not {order!r}")


def fg_integral_field(W: BicomplexField2D, pair: GeneratingPair,
                      order: str = "xy") -> BicomplexField2D:
    """(F,G)-integral from the origin to every node along L-shaped paths."""
    Fs, Gs = adjoint_pair(pair)
    grid = W.grid
    sc_g = _l_path_sc((Gs * W).values, grid, order)
    sc_f = _l_path_sc((Fs * W).values, grid, order)
    return BicomplexField2D(grid, pair.F.values * sc_g + pair.G.values * sc_f)


@dataclass
class GeneratingSequence:
    """Period-two generating sequence ``(F, G), (F1, G1), (F, G), ...``."""

    pairs: tuple[GeneratingPair, GeneratingPair]

    def __getitem__(self, m: int) -> GeneratingPair:
        return self.pairs[m % 2]

    @classmethod
    def from_phi(cls, f: np.ndarray, g: np.ndarray, grid: Grid2D) -> "GeneratingSequence":
        phi = np.outer(f, g)
        phi1 = np.outer(1.0 / f, g)
        pair0 = GeneratingPair(BicomplexField2D(grid, BicomplexArray(phi)),
                               BicomplexField2D(grid, BicomplexArray(0 * phi, 1.0 / phi)))
        pair1 = GeneratingPair(BicomplexField2D(grid, BicomplexArray(phi1)),
                               BicomplexField2D(grid, BicomplexArray(0 * phi1, 1.0 / phi1)))
        return cls((pair0, pair1))

    @classmethod
    def from_data(cls, data) -> "GeneratingSequence":
        return cls.from_phi(data.f.samples, data.g.samples, data.grid)


def _unit_star(n: int, unit: str, xs: XSystems, ys: XSystems):
    """``(Sc, Vec)`` of ``*Z^(n)`` for coefficient ``1`` or ``k``."""
    odd = n % 2 == 1
    if unit == "1":
        xpart = xs.direct if odd else xs.tilde
        ypart, shift = ys.tilde, 0
    else:
        xpart = xs.tilde if odd else xs.direct
        ypart, shift = ys.direct, 1
    X = np.stack([xpart[n - m].samples for m in range(n + 1)], axis=1)
    Y = np.stack([ypart[m].samples for m in range(n + 1)], axis=1)
    # k^(m+shift) is ±1 (scalar part) or ±k (vector part)
    w_sc = np.zeros(n + 1)
    w_vec = np.zeros(n + 1)
    for m in range(n + 1):
        s, v = k_power(m + shift)
        w_sc[m], w_vec[m] = comb(n, m) * s, comb(n, m) * v
    return (X * w_sc) @ Y.T, (X * w_vec) @ Y.T


def formal_power_closed(n: int, alpha, xs: XSystems, ys: XSystems,
                        phi: np.ndarray | BicomplexField2D,
                        grid: Grid2D | None = None) -> BicomplexField2D:
    """``Z^(n)(alpha, 0; z) = phi Sc(*Z) + (k/phi) Vec(*Z)``.

    For the succeeding equation pass ``xs.swapped()`` (the systems of
    ``1/f``) and ``phi = g/f``.
    """
    if n < 0 or n > min(xs.n_max, ys.n_max):
        raise DegreeOutOfRange(f"degree {n} not available (n_max = {xs.n_max})")
    if isinstance(phi, BicomplexField2D):
        grid = phi.grid
        phi = phi.u
    if grid is None:
        grid = Grid2D(xs.direct[0].grid, ys.direct[0].grid)
    alpha = Bicomplex.coerce(alpha)
    sc = vec = 0
    # linear in alpha; units with a zero coefficient are skipped
    for unit, c in (("1", alpha.u), ("k", alpha.v)):
        if c != 0:
            s_part, v_part = _unit_star(n, unit, xs, ys)
            sc = sc + c * s_part
            vec = vec + c * v_part
    if isinstance(sc, int):
        sc = vec = np.zeros((xs.direct[0].grid.point_count, ys.direct[0].grid.point_count),
                            dtype=complex)
    return BicomplexField2D(grid, BicomplexArray(phi * sc, vec / phi))


def iter_recursive_powers(seq: GeneratingSequence, n_max: int, alpha=1.0,
                          order: str = "xy"):
    """Yield ``(n, m, Z_m^(n)(alpha, 0; z))`` degree by degree, keeping only
    the previous degree in memory."""
    grid = seq[0].grid
    level = {}
    for m in (0, 1):
        pair = seq[m]
        lam, mu = pair.decompose_at(grid.center, alpha)
        level[m] = lam * pair.F + mu * pair.G
        yield 0, m, level[m]
    for n in range(n_max):
        level = {m: (n + 1) * fg_integral_field(level[1 - m], seq[m], order)
                 for m in (0, 1)}
        for m in (0, 1):
            yield n + 1, m, level[m]


def formal_powers_recursive(seq: GeneratingSequence, n_max: int, alpha=1.0,
                            order: str = "xy") -> dict[tuple[int, int], BicomplexField2D]:
    """All ``Z_m^(n)(alpha, 0; z)`` for ``n <= n_max``, ``m in {0, 1}``."""
    return {(n, m): Z for n, m, Z in iter_recursive_powers(seq, n_max, alpha, order)}


def formal_power_recursive(n: int, alpha, seq: GeneratingSequence,
                           m: int = 0) -> BicomplexField2D:
    """``Z_m^(n)`` by ``Z^(n+1) = (n+1) ∫_0^z Z_{m+1}^(n) d_(F_m,G_m)ζ``."""
    if n < 0:
        raise DegreeOutOfRange("degree must be non-negative")
    return formal_powers_recursive(seq, n, alpha)[(n, m % 2)]


@dataclass
class FormalPowerSet:
    """``Z_m^(n)(1,0;·)`` and ``Z_m^(n)(k,0;·)`` for ``n <= max_degree``.

    ``m = 0`` belongs to the main equation, ``m = 1`` to the succeeding one.
    """

    grid: Grid2D
    max_degree: int
    powers: dict = field(repr=False)
    center: int = 0

    def get(self, n: int, alpha=1.0, m: int = 0) -> BicomplexField2D:
        if not 0 <= n <= self.max_degree:
            raise DegreeOutOfRange(f"degree {n} > {self.max_degree}")
        alpha = Bicomplex.coerce(alpha)
        z1, zk = self.powers[(n, "1", m)], self.powers[(n, "k", m)]
        return BicomplexField2D(self.grid, z1.values * alpha.u + zk.values * alpha.v)

    def combine(self, coefficients, m: int = 0, truncation: int | None = None) -> BicomplexField2D:
        """``Σ_n Z^(n)(a_n, 0; z)`` for bicomplex ``a_n``."""
        coefficients = list(coefficients)
        N = len(coefficients) - 1 if truncation is None else truncation
        if N > self.max_degree or N >= len(coefficients):
            raise DegreeOutOfRange(f"truncation {N} exceeds available degree")
        total = BicomplexArray(np.zeros(self.grid.shape, dtype=complex))
        for n in range(N + 1):
            a = Bicomplex.coerce(coefficients[n])
            total = total + self.powers[(n, "1", m)].values * a.u \
                + self.powers[(n, "k", m)].values * a.v
        return BicomplexField2D(self.grid, total)

    def family(self, degree: int, m: int = 0) -> list[BicomplexField2D]:
        """The complete family ``Z^(n)(1), Z^(n)(k)`` for ``n <= degree``."""
        return [self.powers[(n, unit, m)] for n in range(degree + 1) for unit in ("1", "k")]

    @classmethod
    def closed_form(cls, data, n_max: int, eps_f: float = 1e-12,
                    equations=(0, 1)) -> "FormalPowerSet":
        """Both equations' powers from the X/Y systems of ``data`` (a
        :class:`~pseudopower.dirac.PotentialData`)."""
        powers = {(n, unit, m): Z for n, unit, m, Z
                  in iter_closed_powers(data, n_max, eps_f, equations)}
        return cls(data.grid, n_max, powers)

    @classmethod
    def recursive(cls, seq: GeneratingSequence, n_max: int) -> "FormalPowerSet":
        powers = {}
        for unit, alpha in (("1", 1.0), ("k", K)):
            for (n, m), Z in formal_powers_recursive(seq, n_max, alpha).items():
                powers[(n, unit, m)] = Z
        return cls(seq[0].grid, n_max, powers)

    @classmethod
    def from_operators(cls, ops, grid: Grid2D, n_max: int) -> "FormalPowerSet":
        """``T0[a z^n]`` and ``T1[a z^n]``."""
        z = grid.z()
        powers = {}
        zn = BicomplexArray.full(grid.shape, 1.0)
        for n in range(n_max + 1):
            for unit, alpha in (("1", Bicomplex(1.0)), ("k", K)):
                w = BicomplexField2D(grid, zn * alpha)
                powers[(n, unit, 0)] = ops.T0(w)
                powers[(n, unit, 1)] = ops.T1(w)
            zn = zn * z
        return cls(grid, n_max, powers)


def closed_setup(data, n_max: int, eps_f: float = 1e-12):
    """``(ys, {m: (x-systems, phi_m)})`` for both equations."""
    xs = build_x_systems(data.f, n_max, eps_f)
    ys = build_x_systems(data.g, n_max, eps_f)
    f, g = data.f.samples, data.g.samples
    return ys, {0: (xs, np.outer(f, g)), 1: (xs.swapped(), np.outer(1.0 / f, g))}


def iter_closed_powers(data, n_max: int, eps_f: float = 1e-12, equations=(0, 1)):
    """Yield ``(n, unit, m, Z)`` one field at a time (``unit`` is ``"1"`` or
    ``"k"``, ``m = 0`` main equation, ``m = 1`` succeeding)."""
    ys, setup = closed_setup(data, n_max, eps_f)
    for m in equations:
        xsys, ph = setup[m]
        for n in range(n_max + 1):
            yield n, "1", m, formal_power_closed(n, 1.0, xsys, ys, ph, data.grid)
            yield n, "k", m, formal_power_closed(n, K, xsys, ys, ph, data.grid)
