"""Invariant suite behind ``pseudopower verify``.

Every check is evaluated on the configured grid and on the grid made of
every other node, which gives an observed convergence order
``log2(coarse/fine)``.  Records follow the report schema
``{check_name, tolerance, measured, order_estimate, pass}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bicomplex import Bicomplex, BicomplexArray, K
from .dirac import PotentialData, derive_potential_data, schrodinger_residual, vekua_residual
from .formal_powers import (GeneratingSequence, closed_setup, formal_power_closed,
                            iter_recursive_powers)
from .grids import ComplexField1D, Grid2D, SymmetricGrid1D, partial, wirtinger_fd
from .systems import build_function_system
from .transmutation import OperatorSet


@dataclass
class Measurement:
    name: str
    measured: float
    tolerance: float
    order_matters: bool = True


def coarsened(grid: Grid2D) -> Grid2D | None:
    """Every other node of ``grid`` (same domain), or None if that grid
    would be too small or even-sized."""
    nx, ny = ((n + 1) // 2 for n in grid.shape)
    if min(nx, ny) < 5 or nx % 2 == 0 or ny % 2 == 0:
        return None
    return Grid2D(SymmetricGrid1D(grid.x_grid.half_width, nx),
                  SymmetricGrid1D(grid.y_grid.half_width, ny))


def observed_order(coarse: float | None, fine: float) -> float | None:
    if coarse is None or not (fine > 1e-14 and coarse > 1e-14):
        return None
    return math.log2(coarse / fine)


def _rel(err: np.ndarray, ref: np.ndarray) -> float:
    return float(np.max(np.abs(err)) / max(np.max(np.abs(ref)), 1e-300))


def mapping_errors(f: ComplexField1D, Tf, T1f, n_max: int) -> tuple[float, float]:
    """``max_k |T_f[x^k] - phi_k| / |phi_k|`` and the same for ``T_{1/f}``."""
    x = f.grid.nodes
    phi = build_function_system(f, n_max, "phi")
    phit = build_function_system(f, n_max, "phi_tilde")
    e1 = e2 = 0.0
    for k in range(n_max + 1):
        xk = x ** k
        e1 = max(e1, _rel(Tf.apply(xk) - phi[k].samples, phi[k].samples))
        e2 = max(e2, _rel(T1f.apply(xk) - phit[k].samples, phit[k].samples))
    return e1, e2


def commutation_errors(f: ComplexField1D, Tf, T1f) -> tuple[float, float]:
    """Residuals of ``(f T_{1/f} u)' = f T_f u'`` and
    ``((1/f) T_f u)' = (1/f) T_{1/f} u'`` for ``u = sin 2x + x²``."""
    x, h, fs = f.grid.nodes, f.grid.step, f.samples
    u = np.sin(2 * x) + x ** 2
    du = 2 * np.cos(2 * x) + 2 * x
    rhs1 = fs * Tf.apply(du)
    rhs2 = T1f.apply(du) / fs
    lhs1 = partial(fs * T1f.apply(u), h, 0)
    lhs2 = partial(Tf.apply(u) / fs, h, 0)
    return _rel(lhs1 - rhs1, rhs1), _rel(lhs2 - rhs2, rhs2)


def is_free(data: PotentialData) -> bool:
    return not np.any(data.p) and data.m == 0 and data.omega == 0


def measure(data: PotentialData, n_max: int, tol) -> list[Measurement]:
    """All checks on one grid."""
    grid = data.grid
    h = max(grid.x_grid.step, grid.y_grid.step)
    h2 = h * h
    C = tol.residual_multiplier
    out = []
    ops = OperatorSet.build(data.f, data.g, data.q, data.q_tilde, data.df, data.dg,
                            tol=tol.picard_tol, max_iter=tol.picard_max_iter)
    its = max(ops.kernel_f.base.iterations, ops.kernel_g.base.iterations)
    out.append(Measurement("goursat_iterations", its, tol.picard_max_iter, False))

    ex, et = mapping_errors(data.f, ops.Tf, ops.T1f, n_max)
    ey, eyt = mapping_errors(data.g, ops.Tg, ops.T1g, n_max)
    # 1e-4 at h = 1e-3 with C = 100; second order on coarser grids
    tmap = max(tol.mapping, C * h2)
    out += [Measurement("mapping_T_f", ex, tmap),
            Measurement("mapping_T_1/f", et, tmap),
            Measurement("mapping_T_g", ey, tmap),
            Measurement("mapping_T_1/g", eyt, tmap)]

    cx1, cx2 = commutation_errors(data.f, ops.Tf, ops.T1f)
    cy1, cy2 = commutation_errors(data.g, ops.Tg, ops.T1g)
    out += [Measurement("commutation_x_f_T1f", cx1, C * h2),
            Measurement("commutation_x_T1f_f", cx2, C * h2),
            Measurement("commutation_y_g_T1g", cy1, C * h2),
            Measurement("commutation_y_T1g_g", cy2, C * h2)]

    # Vekua / Schrodinger residuals relative to max(1, |Z|), and the
    # closed form against the recursion, one power at a time
    coef = {0: data.dbar_log_phi(), 1: -1.0 * data.d_log_phi()}
    # succeeding equation: the roles of nu and mu swap
    pots = {0: (data.nu, data.mu), 1: (data.mu, data.nu)}
    vek = {0: 0.0, 1: 0.0}
    sch = {"nu": 0.0, "mu": 0.0}
    diff = collapse = 0.0
    free = is_free(data)
    z = grid.z() if free else None
    ys, setup = closed_setup(data, n_max, tol.eps_f)
    seq = GeneratingSequence.from_data(data)
    for alpha in (Bicomplex(1.0), K):
        for n, m, Zr in iter_recursive_powers(seq, n_max, alpha):
            xsys, ph = setup[m]
            Z = formal_power_closed(n, alpha, xsys, ys, ph, grid)
            diff = max(diff, (Z - Zr).norm())
            del Zr
            scale = max(1.0, Z.norm())
            vek[m] = max(vek[m], vekua_residual(Z, None, coef[m]) / scale)
            psc, pvec = pots[m]
            rs = schrodinger_residual(Z.u, psc, grid) / scale
            rv = schrodinger_residual(Z.v, pvec, grid) / scale
            sc_name, vec_name = ("nu", "mu") if m == 0 else ("mu", "nu")
            sch[sc_name] = max(sch[sc_name], rs)
            sch[vec_name] = max(sch[vec_name], rv)
            if free:
                ref = BicomplexArray.full(grid.shape, 1.0)
                for _ in range(n):
                    ref = ref * z
                ref = ref * alpha
                collapse = max(collapse, (Z.values - ref).norm() / ref.norm())
    out += [Measurement("vekua_main", vek[0], C * h2),
            Measurement("vekua_succeeding", vek[1], C * h2),
            Measurement("schrodinger_nu", sch["nu"], C * h2),
            Measurement("schrodinger_mu", sch["mu"], C * h2),
            Measurement("closed_vs_recursive", diff, tol.closed_vs_recursive * h2, False)]

    phi = data.phi
    prod = wirtinger_fd(phi, "dbar").values * wirtinger_fd(phi, "d").values \
        / (phi.values * phi.values)
    mu = data.mu.samples[:, None]
    # bicomplex identity: the k-part of the product must vanish as well
    defect = np.abs(8 * prod.u - data.nu.samples[:, None] - mu) + np.abs(8 * prod.v)
    out.append(Measurement("mu_identity", _rel(defect, np.maximum(1.0, np.abs(mu))), C * h2))

    if free:
        out.append(Measurement("free_collapse", collapse, tol.free_case, False))
        ident = max(float(np.max(np.abs(T.matrix - np.eye(T.matrix.shape[0]))))
                    for T in (ops.Tf, ops.Tg, ops.T1f, ops.T1g))
        out.append(Measurement("free_identity_operators", ident, 1e-12, False))
    return out


def split_homomorphism_defect(seed: int, count: int = 1000) -> float:
    """``max |split(ab) - split(a) split(b)|`` (relative) on random pairs."""
    rng = np.random.default_rng(seed)

    def draw():
        u = rng.standard_normal(count) + 1j * rng.standard_normal(count)
        v = rng.standard_normal(count) + 1j * rng.standard_normal(count)
        return BicomplexArray(u, v)

    a, b = draw(), draw()
    pa, ma = a.split()
    pb, mb = b.split()
    pab, mab = (a * b).split()
    ref = np.abs(pa * pb) + np.abs(ma * mb) + 1.0
    return float(np.max((np.abs(pab - pa * pb) + np.abs(mab - ma * mb)) / ref))


def run_verification(spec, grid: Grid2D, n_max: int, tol, seed: int = 0) -> list[dict]:
    """Report records for ``spec`` (a PotentialSpec) on ``grid``."""
    fine = measure(derive_potential_data(spec, grid), n_max, tol)
    fine.append(Measurement("split_homomorphism", split_homomorphism_defect(seed),
                            1e-14, False))
    coarse_grid = coarsened(grid)
    coarse = {}
    if coarse_grid is not None and spec.kind != "table":
        coarse = {m.name: m.measured
                  for m in measure(derive_potential_data(spec, coarse_grid), n_max, tol)}
    records = []
    for m in fine:
        order = observed_order(coarse.get(m.name), m.measured) if m.order_matters else None
        records.append({"check_name": m.name, "tolerance": float(m.tolerance),
                        "measured": float(m.measured), "order_estimate": order,
                        "pass": bool(m.measured <= m.tolerance)})
    return records
