from math import factorial

import numpy as np
import pytest

from pseudopower.bicomplex import BicomplexArray, K
from pseudopower.dirac import PotentialSpec, derive_potential_data
from pseudopower.errors import GridMismatch, NoConvergence, SingularStep
from pseudopower.formal_powers import (GeneratingSequence, closed_setup, fg_derivative,
                                       formal_power_closed)
from pseudopower.grids import (BicomplexField2D, ComplexField1D, Grid2D, SymmetricGrid1D,
                               wirtinger_fd)
from pseudopower.systems import build_function_system
from pseudopower.transmutation import (Transmutation, apply_recip_transmutation,
                                       apply_transmutation, dress_kernel, goursat_kernel,
                                       invert_transmutation, transmutation_matrix)

from conftest import LINEAR, SINE, operators, potential_data


def const_field(grid, c):
    return ComplexField1D(grid, np.full(grid.point_count, c, dtype=complex))


def series_kernel(c, x, t, terms=20):
    """K for q ≡ c from the double series of the characteristic equation:
    H(u, v) = (c/2) Σ c^k u^(k+1) v^k / ((k+1)! k!)."""
    u, v = (x + t) / 2, (x - t) / 2
    return 0.5 * c * sum(c ** k * u ** (k + 1) * v ** k / (factorial(k + 1) * factorial(k))
                         for k in range(terms))


def test_zero_potential_gives_zero_kernel():
    g = SymmetricGrid1D(1.0, 51)
    kern = goursat_kernel(const_field(g, 0.0))
    assert not np.any(kern.values)
    assert not np.any(kern.dt)


@pytest.mark.parametrize("c", [1.0, -2.0, 0.5j])
def test_constant_potential_matches_series(c):
    g = SymmetricGrid1D(1.0, 201)
    kern = goursat_kernel(const_field(g, c))
    X, T = np.meshgrid(g.nodes, g.nodes, indexing="ij")
    ref = np.where(kern.mask(), series_kernel(c, X, T), 0)
    # second-order accurate: ~1e-7 at h = 0.01
    assert np.max(np.abs(kern.values - ref)) < 1e-6 * max(1, abs(c)) ** 2
    assert kern.iterations <= 50


def test_constant_potential_poly5_scheme():
    g = SymmetricGrid1D(1.0, 201)
    kern = goursat_kernel(const_field(g, 1.0), scheme="poly5")
    X, T = np.meshgrid(g.nodes, g.nodes, indexing="ij")
    ref = np.where(kern.mask(), series_kernel(1.0, X, T), 0)
    assert np.max(np.abs(kern.values - ref)) < 1e-8


def test_boundary_conditions():
    g = SymmetricGrid1D(1.0, 201)
    x = g.nodes
    q = np.cos(3 * x) + x
    kern = goursat_kernel(ComplexField1D(g, q.astype(complex)))
    n = g.point_count
    diag = kern.values[np.arange(n), np.arange(n)]
    anti = kern.values[np.arange(n), np.arange(n)[::-1]]
    half_int = 0.5 * (np.sin(3 * x) / 3 + x ** 2 / 2)
    assert np.max(np.abs(diag - half_int)) < 1e-4
    assert np.max(np.abs(anti)) < 1e-12


def wave_residual(n):
    g = SymmetricGrid1D(1.0, n)
    x = g.nodes
    q = x ** 2 + 1
    Kv = goursat_kernel(ComplexField1D(g, q.astype(complex))).values
    h = g.step
    c = g.center
    Kxx = (Kv[2:, 1:-1] - 2 * Kv[1:-1, 1:-1] + Kv[:-2, 1:-1]) / h ** 2
    Ktt = (Kv[1:-1, 2:] - 2 * Kv[1:-1, 1:-1] + Kv[1:-1, :-2]) / h ** 2
    r = Kxx - q[1:-1, None] * Kv[1:-1, 1:-1] - Ktt
    # strictly inside the triangle, off its edges
    off = np.abs(np.arange(1, n - 1) - c)
    inside = off[None, :] < off[:, None] - 1
    return np.max(np.abs(r[inside]))


def test_wave_equation_residual_is_second_order():
    r1, r2 = wave_residual(101), wave_residual(201)
    assert r2 < 1e-3
    assert np.log2(r1 / r2) > 1.8


def test_kernel_is_nonlinear_in_q():
    g = SymmetricGrid1D(1.0, 101)
    k1 = goursat_kernel(const_field(g, 1.0)).values
    k2 = goursat_kernel(const_field(g, 2.0)).values
    assert np.max(np.abs(k2 - 2 * k1)) > 1e-3


def test_no_convergence():
    g = SymmetricGrid1D(1.0, 51)
    with pytest.raises(NoConvergence):
        goursat_kernel(const_field(g, 5.0), max_iter=3)


def test_dress_kernel_trivial_cases():
    g = SymmetricGrid1D(1.0, 51)
    zero = goursat_kernel(const_field(g, 0.0))
    d = dress_kernel(zero, 0.3)
    assert np.allclose(d.values[zero.mask()], 0.15)
    base = goursat_kernel(const_field(g, 1.5))
    d0 = dress_kernel(base, 0.0)
    assert np.array_equal(d0.values, base.values)


def test_linear_generator_mapping():
    # f = 1 + c x has q = 0 and slope c, so the dressed kernel is c/2
    c = 0.4
    g = SymmetricGrid1D(1.0, 41)
    x = g.nodes
    d = dress_kernel(goursat_kernel(const_field(g, 0.0)), c)
    one = apply_transmutation(d, const_field(g, 1.0)).samples
    assert np.max(np.abs(one - (1 + c * x))) < 1e-14
    xs = apply_transmutation(d, ComplexField1D(g, x.astype(complex))).samples
    assert np.max(np.abs(xs - x)) < 1e-14


def test_zero_kernel_is_identity():
    g = SymmetricGrid1D(1.0, 41)
    d = dress_kernel(goursat_kernel(const_field(g, 0.0)), 0.0)
    assert np.array_equal(transmutation_matrix(d), np.eye(41))
    u = ComplexField1D(g, np.sin(g.nodes).astype(complex))
    f = const_field(g, 1.0)
    assert np.allclose(apply_recip_transmutation(f, d, u).samples, u.samples, atol=1e-15)


def test_apply_grid_mismatch():
    g = SymmetricGrid1D(1.0, 41)
    d = dress_kernel(goursat_kernel(const_field(g, 0.0)), 0.0)
    with pytest.raises(GridMismatch):
        apply_transmutation(d, const_field(SymmetricGrid1D(1.0, 43), 1.0))
    T = Transmutation(g, transmutation_matrix(d))
    with pytest.raises(GridMismatch):
        T.apply(np.ones(43))


@pytest.mark.parametrize("spec", [LINEAR, SINE])
def test_mapping_of_powers(spec):
    errs = {"phi": [], "phi_tilde": []}
    for n in (101, 201):
        data = potential_data(n, spec)
        ops = operators(data)
        x = data.grid.x_grid.nodes
        phi = build_function_system(data.f, 6, "phi")
        phit = build_function_system(data.f, 6, "phi_tilde")
        errs["phi"].append(max(np.max(np.abs(ops.Tf.apply(x ** k) - phi[k].samples))
                               / np.max(np.abs(phi[k].samples)) for k in range(7)))
        errs["phi_tilde"].append(max(np.max(np.abs(ops.T1f.apply(x ** k) - phit[k].samples))
                                     / np.max(np.abs(phit[k].samples)) for k in range(7)))
    for e in errs.values():
        assert e[1] < 1e-4
        assert e[0] / e[1] > 3.5


def test_reciprocal_of_one_is_reciprocal_generator(linear101, ops101):
    data = linear101
    out = ops101.T1f.apply(np.ones(data.grid.x_grid.point_count))
    assert np.max(np.abs(out - 1 / data.f.samples)) < 1e-4


def test_reciprocal_methods_agree():
    errs = []
    for n in (101, 201):
        data = potential_data(n)
        kd = dress_kernel(goursat_kernel(data.q), data.df[data.grid.x_grid.center])
        x = data.grid.x_grid.nodes
        u = ComplexField1D(data.grid.x_grid, (np.sin(2 * x) + x ** 2).astype(complex))
        a = apply_recip_transmutation(data.f, kd, u, data.df).samples
        b = apply_recip_transmutation(data.f, kd, u, data.df, method="derivative").samples
        errs.append(np.max(np.abs(a - b)))
    assert errs[1] < 1e-3
    assert np.log2(errs[0] / errs[1]) > 1.8


def test_inverse_round_trip_large_grid():
    g = SymmetricGrid1D(1.0, 2001)
    x = g.nodes
    q = ComplexField1D(g, (np.cos(np.pi * x) * np.pi + (np.sin(np.pi * x) + 0.5) ** 2).astype(complex))
    kd = dress_kernel(goursat_kernel(q), 0.5)
    T = Transmutation(g, transmutation_matrix(kd))
    for k in range(6):
        u = ComplexField1D(g, (x ** k).astype(complex))
        back = invert_transmutation(T, T(u)).samples
        assert np.max(np.abs(back - u.samples)) <= 1e-8 * max(1.0, np.max(np.abs(u.samples)))
        v = T(invert_transmutation(kd, u)).samples
        assert np.max(np.abs(v - u.samples)) <= 1e-8


def test_zero_kernel_inverse_is_identity():
    g = SymmetricGrid1D(1.0, 21)
    d = dress_kernel(goursat_kernel(const_field(g, 0.0)), 0.0)
    v = ComplexField1D(g, np.exp(g.nodes).astype(complex))
    assert np.array_equal(invert_transmutation(d, v).samples, v.samples)


def test_singular_step():
    g = SymmetricGrid1D(1.0, 5)
    M = np.eye(5, dtype=complex)
    M[2, 2] = 0.0
    with pytest.raises(SingularStep):
        Transmutation(g, M).solve(np.ones(5))


def test_composite_operators_on_constants(linear101, ops101):
    data, ops = linear101, ops101
    grid = data.grid
    one = BicomplexField2D(grid, BicomplexArray.full(grid.shape, 1.0))
    T0 = ops.T0(one)
    assert np.max(np.abs(T0.u - data.phi.u)) < 1e-4 * data.phi.norm()
    assert np.max(np.abs(T0.v)) == 0
    T1 = ops.T1(one)
    ref = np.outer(1 / data.f.samples, data.g.samples)
    assert np.max(np.abs(T1.u - ref)) < 1e-4 * np.max(np.abs(ref))


def test_origin_values_preserved(linear101, ops101):
    grid = linear101.grid
    rng = np.random.default_rng(3)
    W = BicomplexField2D(grid, BicomplexArray(
        rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape),
        rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)))
    c = grid.center
    for op in (ops101.T0, ops101.T1):
        out = op(W)
        assert out.u[c] == W.u[c] and out.v[c] == W.v[c]


def test_fibre_order_is_irrelevant(linear101, ops101):
    grid = linear101.grid
    X, Y = grid.mesh()
    u = np.exp(X) * np.cos(3 * Y) + 1j * X * Y
    xy = ops101.Tg.apply(ops101.Tf.apply(u, axis=0), axis=1)
    yx = ops101.Tf.apply(ops101.Tg.apply(u, axis=1), axis=0)
    assert np.max(np.abs(xy - yx)) < 1e-12 * np.max(np.abs(xy))


def test_inverse_operators(linear101, ops101):
    grid = linear101.grid
    W = BicomplexField2D.from_function(grid, lambda z: z ** 3 + z * 0.5)
    for fwd, inv in ((ops101.T0, ops101.T0_inverse), (ops101.T1, ops101.T1_inverse)):
        back = inv(fwd(W))
        assert (back - W).norm() < 1e-10 * W.norm()


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_operators_map_powers_to_formal_powers(n, linear101, ops101):
    data = linear101
    ys, setup = closed_setup(data, 3)
    for alpha in (1.0, K):
        w = BicomplexField2D(data.grid, data.grid.z() ** n * alpha)
        for m, op in ((0, ops101.T0), (1, ops101.T1)):
            xsys, ph = setup[m]
            Z = formal_power_closed(n, alpha, xsys, ys, ph, data.grid)
            assert (op(w) - Z).norm() < 1e-3 * max(1.0, Z.norm())


def commutation_defects(n):
    data = potential_data(n)
    ops = operators(data)
    grid = data.grid
    X, Y = grid.mesh()
    w = BicomplexField2D(grid, BicomplexArray(np.sin(X) * Y + 1j * X ** 2,
                                              np.cos(Y) * X ** 2 - 0.5j * Y))
    b = data.dbar_log_phi().values
    B = data.d_log_phi().values
    out = []
    for which, c0, c1 in (("dbar", b, B), ("d", B, b)):
        dw = wirtinger_fd(w, which)
        W0, W1 = ops.T0(w), ops.T1(w)
        lhs0 = wirtinger_fd(W0, which).values - c0 * W0.values.conj()
        lhs1 = wirtinger_fd(W1, which).values + c1 * W1.values.conj()
        out.append((lhs0 - ops.T1(dw).values).norm())
        out.append((lhs1 - ops.T0(dw).values).norm())
    return np.array(out)


def test_commutation_with_wirtinger_operators():
    coarse, fine = commutation_defects(51), commutation_defects(101)
    assert np.all(fine < 1e-2)
    assert np.all(np.log2(coarse / fine) > 1.8)


def test_derivatives_of_images():
    errs = []
    for n in (51, 101):
        data = potential_data(n)
        ops = operators(data)
        z = data.grid.z()
        seq = GeneratingSequence.from_data(data)
        W = ops.T0(BicomplexField2D(data.grid, z ** 3))
        W1 = fg_derivative(W, seq[0])
        W2 = fg_derivative(W1, seq[1])
        # differentiating twice loses an order at the boundary rows
        inner = (slice(2, -2), slice(2, -2))
        e1 = (W1 - ops.T1(BicomplexField2D(data.grid, z ** 2 * 3.0))).values[inner].norm()
        e2 = (W2 - ops.T0(BicomplexField2D(data.grid, z * 6.0))).values[inner].norm()
        errs.append((e1, e2))
    errs = np.array(errs)
    assert np.all(errs[1] < 0.01)
    assert np.all(np.log2(errs[0] / errs[1]) > 1.5)


def test_operator_norm_is_bounded(linear101, ops101):
    grid = linear101.grid
    X, Y = grid.mesh()
    rng = np.random.default_rng(7)
    ratios = []
    for _ in range(5):
        a = rng.standard_normal(4)
        w = BicomplexField2D(grid, BicomplexArray(np.sin(a[0] * X + a[1] * Y) + 0j,
                                                  np.cos(a[2] * X * Y) + 1j * a[3]))
        ratios.append(ops101.T0(w).norm() / w.norm())
    assert max(ratios) < 20


def test_free_case_operators_are_identities(free101):
    ops = operators(free101)
    for T in (ops.Tf, ops.Tg, ops.T1f, ops.T1g):
        assert np.array_equal(T.matrix, np.eye(T.matrix.shape[0]))


def test_complex_slope_on_y_axis():
    data = derive_potential_data(PotentialSpec("zero", omega=2.0), Grid2D.square(1.0, 101))
    ops = operators(data)
    y = data.grid.y_grid.nodes
    assert np.max(np.abs(ops.Tg.apply(np.ones_like(y)) - np.exp(2j * y))) < 1e-3
