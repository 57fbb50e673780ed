import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudopower.grids import ComplexField1D, SymmetricGrid1D
from pseudopower.quadrature import (cell_integrals, cell_weights, cumulative_from_center,
                                    cumulative_from_start)
from pseudopower.systems import cumulative_integral


@pytest.mark.parametrize("scheme", ["trapezoid", "poly5"])
def test_constants_and_linears_exact(scheme):
    g = SymmetricGrid1D(1.0, 21)
    x = g.nodes
    v = cumulative_from_center(np.ones_like(x), g.step, scheme=scheme)
    assert np.max(np.abs(v - x)) < 1e-15
    v = cumulative_from_center(x, g.step, scheme=scheme)
    assert np.max(np.abs(v - x ** 2 / 2)) < 1e-15
    assert v[g.center] == 0.0


@pytest.mark.parametrize("degree", range(6))
def test_poly5_exact_to_degree_five(degree):
    g = SymmetricGrid1D(1.0, 41)
    x = g.nodes
    v = cumulative_from_center((degree + 1) * x ** degree, g.step)
    assert np.max(np.abs(v - x ** (degree + 1))) < 1e-14


def test_exponential_against_antiderivative():
    g = SymmetricGrid1D(1.0, 201)
    for scheme, tol in (("trapezoid", 2 * g.step ** 2), ("poly5", 1e-12)):
        x = g.nodes
        v = cumulative_from_center(np.exp(-2 * x), g.step, scheme=scheme)
        assert np.max(np.abs(v - (1 - np.exp(-2 * x)) / 2)) < tol


def test_trapezoid_second_order():
    errs = []
    for n in (101, 201, 401):
        g = SymmetricGrid1D(1.0, n)
        x = g.nodes
        v = cumulative_from_center(np.exp(-2 * x), g.step, scheme="trapezoid")
        errs.append(np.max(np.abs(v - (1 - np.exp(-2 * x)) / 2)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(ratios > 3.9)


@pytest.mark.parametrize("offsets", [(0, 1, 2, 3, 4, 5), (-2, -1, 0, 1, 2, 3), (-4, -3, -2, -1, 0, 1)])
def test_cell_weights_integrate_monomials(offsets):
    w = np.array(cell_weights(offsets))
    s = np.array(offsets, dtype=float)
    for d in range(6):
        assert abs(w @ s ** d - 1.0 / (d + 1)) < 1e-15 * (np.abs(w) @ np.abs(s) ** d + 1)


def test_causal_cells_exact_after_startup():
    x = np.linspace(0, 1, 31)
    h = x[1] - x[0]
    cells = cell_integrals(x ** 5, h, causal=True)
    exact = np.diff(x ** 6 / 6)
    # cell i uses nodes 0..i+1 until six are available
    assert np.max(np.abs(cells[4:] - exact[4:])) < 1e-15
    assert np.max(np.abs(cells[:4] - exact[:4])) > 1e-12
    v = cumulative_from_start(np.stack([x, 1 + x], axis=1), h, axis=0, causal=True)
    assert np.allclose(v[:, 0], x ** 2 / 2, atol=1e-15)
    assert np.allclose(v[:, 1], x + x ** 2 / 2, atol=1e-15)


def test_causal_weights_use_no_future_values():
    # a spike at node j must not change integrals that end before j
    x = np.zeros(40)
    x[25] = 1.0
    v = cumulative_from_start(x, 0.1, causal=True)
    assert np.all(v[:25] == 0)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=6))
def test_cumulative_integral_polynomial_property(coeffs):
    g = SymmetricGrid1D(2.0, 31)
    p = np.polynomial.Polynomial(coeffs)
    u = ComplexField1D(g, p(g.nodes).astype(complex))
    v = cumulative_integral(u).samples
    exact = p.integ()(g.nodes)
    assert np.max(np.abs(v - exact)) <= 1e-12 * (1 + np.max(np.abs(exact)))
