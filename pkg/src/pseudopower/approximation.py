"""Taylor series in formal powers and Runge-type approximation."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from math import factorial

import numpy as np
from scipy.ndimage import map_coordinates

from .bicomplex import Bicomplex, idempotent_combine
from .errors import DegreeOutOfRange, IllConditioned, NotASolution, RadiusTooLarge
from .formal_powers import FormalPowerSet, GeneratingSequence, fg_derivative
from .grids import BicomplexField2D, Grid2D


@dataclass
class TaylorExpansion:
    coefficients: list[Bicomplex]
    radius_estimate: float
    radius_plus: float = np.inf
    radius_minus: float = np.inf
    sample_radius: float = 0.0
    center: int = 0

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1


def sample_on_circle(values: np.ndarray, grid: Grid2D, radius: float,
                     count: int, order: int = 1) -> np.ndarray:
    """Interpolate a gridded array at ``r e^{iθ_j}``, ``θ_j = 2πj/count``."""
    theta = 2 * np.pi * np.arange(count) / count
    jx = radius * np.cos(theta) / grid.x_grid.step + grid.x_grid.center
    jy = radius * np.sin(theta) / grid.y_grid.step + grid.y_grid.center
    coords = np.vstack([jx, jy])
    # spline prefilter is global; mode="nearest" keeps the edges tame
    re = map_coordinates(values.real, coords, order=order, mode="nearest")
    im = map_coordinates(values.imag, coords, order=order, mode="nearest")
    return re + 1j * im


def _radius_from_tail(coeffs: np.ndarray, floor: float) -> float:
    """``1/R = limsup |a_n|^(1/n)`` estimated by a log-linear fit of the
    upper half of the resolved coefficients (the leading run above
    ``floor``)."""
    mags = np.abs(coeffs)
    below = np.flatnonzero(mags[1:] <= floor)
    last = mags.size - 1 if below.size == 0 else int(below[0])
    if last < 1:
        return np.inf
    n_use = np.arange(max(1, last // 2), last + 1)
    if n_use.size == 1:
        k = int(n_use[0])
        return float(mags[k] ** (-1.0 / k))
    slope, _ = np.polyfit(n_use, np.log(mags[n_use]), 1)
    return float(np.exp(-slope))


def holomorphic_coefficients(w: BicomplexField2D, n_max: int, radius: float,
                             samples: int | None = None, order: int = 1):
    """Taylor coefficients ``(a_n^+, a_n^-)`` of a bicomplex analytic field.

    ``w- = u + i v`` is holomorphic in ``x + i y`` and ``w+ = u - i v`` is
    antiholomorphic; each is expanded by a discrete Fourier sum on the
    circle ``|z| = radius``.
    """
    count = samples or max(128, 4 * (n_max + 1))
    wp, wm = w.values.split()
    cp = sample_on_circle(wp, w.grid, radius, count, order)
    cm = sample_on_circle(wm, w.grid, radius, count, order)
    scale = radius ** -np.arange(n_max + 1)
    # w- = Σ a_n r^n e^{inθ};  w+ = Σ a_n r^n e^{-inθ}
    a_minus = np.fft.fft(cm)[: n_max + 1] / count * scale
    a_plus = np.fft.ifft(cp)[: n_max + 1] * scale
    return a_plus, a_minus


def taylor_coefficients(W: BicomplexField2D, n_max: int, radius: float, ops,
                        b_coef: BicomplexField2D | None = None,
                        samples: int | None = None, order: int = 1,
                        strict: bool = False) -> TaylorExpansion:
    """Expansion ``W = Σ Z^(n)(a_n, 0; z)`` via the analytic pullback
    ``w = T0^{-1} W``.

    ``ops`` is an :class:`~pseudopower.transmutation.OperatorSet`.  When
    ``b_coef`` (``dbar phi/phi``) is given, the Vekua residual of ``W`` is
    checked: above ``100 h² max(1, |W|)`` a warning is issued, or
    :class:`NotASolution` raised with ``strict=True``.
    """
    grid = W.grid
    limit = min(grid.x_grid.half_width, grid.y_grid.half_width)
    if not 0 < radius < limit:
        raise RadiusTooLarge(f"radius {radius} must lie in (0, {limit})")
    if b_coef is not None:
        from .dirac import vekua_residual

        h = max(grid.x_grid.step, grid.y_grid.step)
        res = vekua_residual(W, None, b_coef)
        bound = 100 * h * h * max(1.0, W.norm())
        if res > bound:
            msg = f"Vekua residual {res:.3e} exceeds {bound:.3e}"
            if strict:
                raise NotASolution(msg)
            warnings.warn(msg)
    w = ops.T0_inverse(W)
    a_plus, a_minus = holomorphic_coefficients(w, n_max, radius, samples, order)
    coeffs = [idempotent_combine(p, m) for p, m in zip(a_plus, a_minus)]
    h = max(grid.x_grid.step, grid.y_grid.step)
    # circle samples carry an interpolation error of order h^(order+1)
    floor = max(1e-10, h ** (order + 1)) * max(np.max(np.abs(a_plus[:1])),
                                               np.max(np.abs(a_minus[:1])), w.norm(), 1e-300)
    # resolved coefficients satisfy |a_n| r^n above the noise floor
    resolved = radius ** np.arange(n_max + 1)
    r_plus = _radius_from_tail(a_plus * resolved, floor) * radius
    r_minus = _radius_from_tail(a_minus * resolved, floor) * radius
    return TaylorExpansion(coeffs, min(r_plus, r_minus), r_plus, r_minus, radius)


def evaluate_formal_series(expansion: TaylorExpansion, powers: FormalPowerSet,
                           truncation: int | None = None, m: int = 0) -> BicomplexField2D:
    """``Σ_{n<=N} Z^(n)(a_n, 0; z)``."""
    N = expansion.n_max if truncation is None else truncation
    return powers.combine(expansion.coefficients, m=m, truncation=N)


def derivative_coefficients(W: BicomplexField2D, seq: GeneratingSequence,
                            n_max: int = 3) -> list[Bicomplex]:
    """``a_n = W^[n](0)/n!`` through repeated (F_m, G_m)-derivatives.

    Each derivative is a finite difference of the previous one, so only
    low orders are meaningful.
    """
    out = []
    current = W
    for n in range(n_max + 1):
        out.append(current.at_center() * (1.0 / factorial(n)))
        if n < n_max:
            current = fg_derivative(current, seq[n])
    return out


def rectangle_boundary_mask(grid: Grid2D, scale: float = 0.8) -> np.ndarray:
    """Nodes on the boundary of the centred rectangle scaled by ``scale``."""
    cx, cy = grid.center
    jx = int(round(scale * cx))
    jy = int(round(scale * cy))
    ox = np.abs(np.arange(grid.shape[0]) - cx)[:, None]
    oy = np.abs(np.arange(grid.shape[1]) - cy)[None, :]
    return ((ox == jx) & (oy <= jy)) | ((oy == jy) & (ox <= jx))


@dataclass
class RungeFit:
    degree: int
    coefficients: list[Bicomplex] = field(repr=False)
    l2_error: float
    sup_error: float
    condition: float

    def record(self) -> dict:
        d = asdict(self)
        d.pop("coefficients")
        return d


def fit_samples(target: tuple[np.ndarray, np.ndarray], family, degree: int,
                max_condition: float = 1e12) -> RungeFit:
    """Least-squares core of :func:`runge_fit` on pre-sampled values.

    ``target`` is ``(Sc, Vec)`` at the fitting nodes and ``family`` the
    matching ``(Sc, Vec)`` samples of ``Z^(0)(1), Z^(0)(k), Z^(1)(1), ...``.
    """
    family = list(family)[: 2 * (degree + 1)]
    if len(family) < 2 * (degree + 1):
        raise DegreeOutOfRange(f"family too short for degree {degree}")
    A = np.stack([np.concatenate([u, v]) for u, v in family], axis=1)
    rhs = np.concatenate([target[0], target[1]])
    n_pts = target[0].size
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    As = A / scale
    # SVD-based least squares (rank revealing)
    sol, _, _, sv = np.linalg.lstsq(As, rhs, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf

    def _finish(y):
        x = y / scale
        coeffs = [Bicomplex.from_uv(x[2 * n], x[2 * n + 1]) for n in range(degree + 1)]
        resid = As @ y - rhs
        du, dv = resid[:n_pts], resid[n_pts:]
        return RungeFit(degree, coeffs,
                        float(np.sqrt(np.mean(np.abs(du) ** 2 + np.abs(dv) ** 2))),
                        float(np.max(np.abs(du) + np.abs(dv))), cond)

    if cond > max_condition:
        fallback, *_ = np.linalg.lstsq(As, rhs, rcond=1.0 / max_condition)
        raise IllConditioned(f"condition estimate {cond:.3e}", _finish(fallback))
    return _finish(sol)


def runge_fit(target: BicomplexField2D, powers: FormalPowerSet, degree: int,
              mask: np.ndarray | None = None, m: int = 0,
              max_condition: float = 1e12) -> RungeFit:
    """Least-squares formal polynomial of the given degree on the node set
    ``mask`` (default: boundary of the 80% rectangle).

    Unknowns are the scalar coefficients ``c`` of ``Z^(n)(1)`` and ``d`` of
    ``Z^(n)(k)``, so that ``a_n = c_n + k d_n``; the reported sup error is
    ``max(|ΔSc| + |ΔVec|)`` over the same nodes.
    """
    if degree > powers.max_degree:
        raise DegreeOutOfRange(f"degree {degree} > {powers.max_degree}")
    if mask is None:
        mask = rectangle_boundary_mask(target.grid)
    family = [(Z.u[mask], Z.v[mask]) for Z in powers.family(degree, m)]
    return fit_samples((target.u[mask], target.v[mask]), family, degree, max_condition)


def runge_decay(target: BicomplexField2D, powers: FormalPowerSet, degrees,
                mask: np.ndarray | None = None) -> list[RungeFit]:
    return [runge_fit(target, powers, d, mask) for d in degrees]
