import warnings

import numpy as np
import pytest

from pseudopower.bicomplex import BicomplexArray, K
from pseudopower.dirac import (PotentialSpec, abar, derive_potential_data,
                               schrodinger_residual, transfer_W1_to_W2, transfer_W2_to_W1,
                               vekua_residual)
from pseudopower.errors import DerivativeMissing, NonRealPotential, NotCompatible
from pseudopower.formal_powers import FormalPowerSet
from pseudopower.grids import BicomplexField2D, ComplexField1D, Grid2D

from conftest import potential_data


def field(grid, u, v=None):
    return BicomplexField2D(grid, BicomplexArray(np.asarray(u, dtype=complex),
                                                 None if v is None else np.asarray(v, dtype=complex)))


def test_derived_data_linear(linear101):
    d = linear101
    x = d.grid.x_grid.nodes
    y = d.grid.y_grid.nodes
    assert np.max(np.abs(d.f.samples - np.exp(x ** 2 / 2 + 0.5 * x))) < 1e-5
    assert np.max(np.abs(d.g.samples - np.exp(1j * y))) < 1e-15
    assert np.allclose(d.q.samples, 1 + (x + 0.5) ** 2, rtol=0, atol=1e-14)
    assert np.allclose(d.q_tilde.samples, -1.0)
    assert np.allclose(d.nu.samples, 1 + (x + 0.5) ** 2 - 1, atol=1e-14)
    assert np.allclose(d.mu.samples, -1 + (x + 0.5) ** 2 - 1, atol=1e-14)
    assert d.f.at_center == 1 and d.g.at_center == 1


def test_nu_plus_mu(linear101):
    d = linear101
    total = d.nu.samples + d.mu.samples
    assert np.allclose(total, 2 * (d.p + d.m) ** 2 - 2 * d.omega ** 2, rtol=0, atol=1e-14)


def test_free_data(free101):
    assert np.all(free101.f.samples == 1) and np.all(free101.g.samples == 1)
    assert not np.any(free101.q.samples) and not np.any(free101.nu.samples)


def test_log_derivatives_match_finite_differences(linear101):
    from pseudopower.grids import wirtinger_fd
    d = linear101
    fd = wirtinger_fd(d.phi, "dbar") / d.phi
    inner = (slice(1, -1), slice(1, -1))
    assert (fd - d.dbar_log_phi()).values[inner].norm() < 1e-3


def test_potential_catalog():
    x = np.linspace(-1, 1, 5)
    p, dp = PotentialSpec("polynomial", (1.0, 0.0, 3.0)).evaluate(x)
    assert np.allclose(p, 1 + 3 * x ** 2) and np.allclose(dp, 6 * x)
    p, dp = PotentialSpec("constant", (2.0,)).evaluate(x)
    assert np.all(p == 2) and np.all(dp == 0)
    with pytest.raises(ValueError):
        PotentialSpec("cubic")


def test_table_potentials():
    grid = Grid2D.square(1.0, 11)
    x = grid.x_grid.nodes
    spec = PotentialSpec("table", table=x.copy(), table_derivative=np.ones_like(x))
    data = derive_potential_data(spec, grid)
    ref = potential_data(11, dict(kind="linear", params=(1.0,)))
    assert np.allclose(data.f.samples, ref.f.samples, rtol=1e-14)
    with pytest.raises(DerivativeMissing):
        derive_potential_data(PotentialSpec("table", table=x.copy()), grid)
    with pytest.raises(NonRealPotential):
        derive_potential_data(PotentialSpec("table", table=x + 1j,
                                            table_derivative=np.ones_like(x)), grid)


def test_abar_exact_gradient():
    grid = Grid2D.square(1.0, 41)
    X, Y = grid.mesh()
    out = abar(field(grid, X, Y))
    assert np.max(np.abs(out - (X ** 2 + Y ** 2))) < 1e-12
    assert abar(field(grid, X, Y), endpoint=(40, 40)) == pytest.approx(2.0)


def test_abar_requires_compatibility():
    grid = Grid2D.square(1.0, 41)
    X, Y = grid.mesh()
    with pytest.raises(NotCompatible):
        abar(field(grid, Y, 0 * X))


def test_abar_path_orders_agree():
    grid = Grid2D.square(1.0, 201)
    X, Y = grid.mesh()
    # gradient of exp(x) sin(y) / 2
    w = field(grid, np.exp(X) * np.sin(Y) / 2, np.exp(X) * np.cos(Y) / 2)
    a, b = abar(w, order="xy"), abar(w, order="yx")
    assert np.max(np.abs(a - b)) < 1e-4
    assert np.max(np.abs(a - np.exp(X) * np.sin(Y))) < 1e-4
    with pytest.raises(ValueError):
        abar(w, order="zz")


def test_transfer_free_examples(free101):
    grid = free101.grid
    X, Y = grid.mesh()
    phi = free101.phi
    assert np.max(np.abs(transfer_W1_to_W2(X, phi) - Y)) < 1e-12
    assert np.max(np.abs(transfer_W1_to_W2(X * Y, phi) - (Y ** 2 - X ** 2) / 2)) < 1e-12
    assert np.max(np.abs(transfer_W2_to_W1(Y, phi) - X)) < 1e-12
    assert np.max(np.abs(transfer_W1_to_W2(X, phi, c1=3.0) - Y - 3.0)) < 1e-12


def test_transfer_recovers_vector_part():
    errs = []
    for n in (51, 101):
        data = potential_data(n)
        Z = FormalPowerSet.closed_form(data, 2, equations=(0,)).get(2, 1.0)
        W2 = transfer_W1_to_W2(Z.u, data.phi, nu=data.nu)
        W1 = transfer_W2_to_W1(Z.v, data.phi, mu=data.mu)
        errs.append((np.max(np.abs(W2 - Z.v)), np.max(np.abs(W1 - Z.u))))
    errs = np.array(errs)
    assert np.all(errs[1] < 1e-2)
    assert np.all(np.log2(errs[0] / errs[1]) > 1.5)


def test_transfer_warns_on_non_solution(linear101, free101):
    X, Y = linear101.grid.mesh()
    with pytest.warns(UserWarning):
        transfer_W1_to_W2(X ** 3 + 5, linear101.phi, nu=linear101.nu, tol=np.inf)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transfer_W1_to_W2(X, free101.phi, nu=free101.nu)


def test_vekua_residual_of_holomorphic_function():
    grid = Grid2D.square(1.0, 41)
    z = grid.z()
    W = BicomplexField2D(grid, z * z * K)
    assert vekua_residual(W) < 1e-12
    X, Y = grid.mesh()
    # dbar of x is 1/2 everywhere
    assert vekua_residual(field(grid, X)) == pytest.approx(0.5)


def test_vekua_residual_of_formal_powers(linear101):
    P = FormalPowerSet.closed_form(linear101, 3, equations=(0,))
    b = linear101.dbar_log_phi()
    h2 = linear101.grid.x_grid.step ** 2
    for n in range(4):
        Z = P.get(n, K)
        assert vekua_residual(Z, None, b) < 100 * h2 * max(1.0, Z.norm())


def test_schrodinger_residual():
    grid = Grid2D.square(1.0, 41)
    X, Y = grid.mesh()
    zero = ComplexField1D(grid.x_grid, np.zeros(41, dtype=complex))
    assert schrodinger_residual(X ** 2 - Y ** 2, zero, grid) < 1e-11
    one = ComplexField1D(grid.x_grid, np.ones(41, dtype=complex))
    r1 = schrodinger_residual(np.exp(X), one, grid)
    r2 = schrodinger_residual(np.exp(Grid2D.square(1.0, 81).mesh()[0]),
                              ComplexField1D(Grid2D.square(1.0, 81).x_grid,
                                             np.ones(81, dtype=complex)),
                              Grid2D.square(1.0, 81))
    assert r2 < 5e-4
    assert np.log2(r1 / r2) > 1.9
