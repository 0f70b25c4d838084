"""The Bergman kernel B_k(z) = sum_i y^k |f_i(z)|^2 of level-one cusp forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .forms import Y_MIN_REDUCED, cusp_basis, parse_weight
from .geom import (
    FUNDAMENTAL_AREA,
    QuadratureGrid,
    TailMajorant,
    as_hpoint,
    build_quadrature,
    integrate_over_F,
    reduce_points,
)
from .pet import OrthoBasis, default_grid, gram_matrix, orthonormalize

PUBLISHED_INTEGRAL_BOUND = 1.0 / (2.0 * math.pi)
PUBLISHED_HALF_BOUND = 1.0 / (8.0 * math.pi)
DERIVED_LIMIT = 1.0 / (4.0 * math.pi)

DEFAULT_PROBES = (1j, complex(0.5, math.sqrt(3.0) / 2.0 + 0.2), complex(0.1, 1.5))


@dataclass(frozen=True)
class BergmanSample:
    z: complex
    value: float
    weight: Fraction
    jk: int


def bergman_values(ortho: OrthoBasis, z, reduce: bool = True) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if ortho.dim == 0:
        return np.zeros(z.shape, dtype=float)
    if reduce:
        z = reduce_points(z)
    v = ortho.values(z)
    return np.sum(v.real**2 + v.imag**2, axis=0)


def bergman_at(ortho: OrthoBasis, z, reduce: bool = True) -> BergmanSample:
    """B_k at z; with ``reduce`` the point is first moved into F."""
    z = as_hpoint(z)
    zr = complex(reduce_points(np.array([z]))[0]) if reduce else z
    return BergmanSample(zr, float(bergman_values(ortho, zr, reduce=False)[0]), ortho.weight, ortho.dim)


def build_ortho(k, trunc: int | None = None, panels=(48, 48), nodes: int = 10, y_cap: float | None = None,
                precision: int = 53, y_min: float = Y_MIN_REDUCED) -> OrthoBasis:
    """Basis -> Gram -> orthonormal transform, with the cap sized to the slowest cusp decay.

    Expansions are long enough for unreduced evaluation down to height y_min.
    """
    k = parse_weight(k)
    basis = cusp_basis(k, trunc, y_min)
    if len(basis) == 0:
        grid = build_quadrature(y_cap or 12.0, panels, nodes)
    else:
        grid = default_grid(basis.members, panels, nodes, y_cap)
    return orthonormalize(basis, gram_matrix(basis, grid, precision))


def _truncated_domain(xs: np.ndarray, ss: np.ndarray, y_cut: float) -> np.ndarray:
    y_low = np.sqrt(1.0 - xs**2)
    return xs + 1j * (y_low + ss * (y_cut - y_low))


def bergman_sup(ortho: OrthoBasis, y_cut: float = 4.0, coarse: int = 64, refine_steps: int = 10,
                candidates: int = 4) -> tuple[float, complex]:
    """Grid-scan lower bound for sup of B_k over F with y <= y_cut.

    A coarse x coarse scan in (x, s) coordinates (y runs linearly from the arc
    to y_cut) is followed by repeated 9 x 9 grid shrinking around the best few
    cells.  The result is a lower bound for the true supremum.
    """
    if y_cut < 1.0:
        raise ValueError("y_cut must be at least 1")
    if ortho.dim == 0:
        return 0.0, 1j
    u = np.linspace(-0.5, 0.5, coarse)
    s = np.linspace(0.0, 1.0, coarse)
    X, Sg = np.meshgrid(u, s, indexing="ij")
    vals = bergman_values(ortho, _truncated_domain(X.ravel(), Sg.ravel(), y_cut), reduce=False)
    order = np.argsort(vals)[::-1][:candidates]
    best_val, best_z = -1.0, 1j
    for flat in order:
        cx, cs = X.ravel()[flat], Sg.ravel()[flat]
        hx, hs = 1.0 / (coarse - 1), 1.0 / (coarse - 1)
        val = vals[flat]
        for _ in range(refine_steps):
            gx = np.clip(cx + np.linspace(-hx, hx, 9), -0.5, 0.5)
            gs = np.clip(cs + np.linspace(-hs, hs, 9), 0.0, 1.0)
            GX, GS = np.meshgrid(gx, gs, indexing="ij")
            local = bergman_values(ortho, _truncated_domain(GX.ravel(), GS.ravel(), y_cut), reduce=False)
            i = int(np.argmax(local))
            if local[i] >= val:
                val, cx, cs = local[i], GX.ravel()[i], GS.ravel()[i]
            hx, hs = hx / 3.0, hs / 3.0
        if val > best_val:
            best_val = float(val)
            best_z = complex(_truncated_domain(np.array(cx), np.array(cs), y_cut))
    return best_val, best_z


@dataclass(frozen=True)
class ScalingRow:
    k: Fraction
    jk: int
    points: tuple[tuple[complex, float, float], ...]
    sup_trunc: float
    argmax: complex
    gram_cond: float = 1.0
    tail_bound: float = 0.0
    residual: float = 0.0
    mass: float | None = field(default=None)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r for _, _, r in self.points])


def mass(ortho: OrthoBasis, grid: QuadratureGrid | None = None) -> float:
    """int_F B_k dmu_hyp; equals j_k for an orthonormal basis."""
    if ortho.dim == 0:
        return 0.0
    if grid is None:
        # deliberately not the Gram grid: different cap and panel layout
        g = ortho.gram.grid
        grid = build_quadrature(g.y_cap * 1.25, (g.panels[0] + 16, g.panels[1] + 16), g.nodes_per_panel)
    value, _ = integrate_over_F(lambda z: bergman_values(ortho, z, reduce=False), grid)
    return value.real


def scaling_row(ortho: OrthoBasis, probes=DEFAULT_PROBES, y_cut: float = 4.0, coarse: int = 64,
                refine_steps: int = 10, with_mass: bool = False) -> ScalingRow:
    kf = float(ortho.weight)
    probes = np.asarray(probes, dtype=complex)
    b = bergman_values(ortho, probes) if ortho.dim else np.zeros(probes.shape)
    points = tuple((complex(z), float(v), float(v) / kf) for z, v in zip(probes, b))
    sup, arg = bergman_sup(ortho, y_cut, coarse, refine_steps)
    return ScalingRow(
        ortho.weight, ortho.dim, points, sup, arg,
        ortho.gram.cond, ortho.gram.tail, ortho.residual,
        mass(ortho) if with_mass else None,
    )


def scaling_study(weights, probes=DEFAULT_PROBES, y_cut: float = 4.0, trunc: int | None = None,
                  panels=(48, 48), nodes: int = 10, y_cap: float | None = None, with_mass: bool = False,
                  coarse: int = 64, refine_steps: int = 10, precision: int = 53) -> list[ScalingRow]:
    rows = []
    for k in weights:
        ortho = build_ortho(k, trunc, panels, nodes, y_cap, precision)
        rows.append(scaling_row(ortho, probes, y_cut, coarse, refine_steps, with_mass))
    return rows


def hyperbolic_bump(center: complex = 0.1 + 1.5j, width: float = 0.25):
    """exp(-(d(z, center) / width)^2) with d the hyperbolic distance."""
    def f(z):
        z = np.asarray(z, dtype=complex)
        cosh_d = 1.0 + np.abs(z - center) ** 2 / (2.0 * z.imag * center.imag)
        return np.exp(-(np.arccosh(cosh_d) / width) ** 2)

    return f


def que_average(testfn, ortho: OrthoBasis, grid: QuadratureGrid | None = None,
                testfn_tail: TailMajorant = TailMajorant(1.0, 0.0, -2.0)) -> tuple[float, float, float]:
    """Normalised Bergman average of testfn against its plain hyperbolic average.

    lhs = int f B_k dmu / int B_k dmu, rhs = int f dmu / vol(F).  The rhs is
    integrated on a grid reaching y = 1e12 so bounded test functions need no
    separate cusp correction; ``testfn_tail`` bounds what remains above it.
    """
    grid = grid or ortho.gram.grid
    if ortho.dim == 0:
        raise ValueError("the Bergman measure of an empty space is zero")
    bk = bergman_values(ortho, grid.z, reduce=False)
    num = float(np.dot(grid.weights, np.asarray(testfn(grid.z)).real * bk))
    den = float(np.dot(grid.weights, bk))
    lhs = num / den
    tall = build_quadrature(1e12, (grid.panels[0], 3 * grid.panels[1]), grid.nodes_per_panel)
    value, tail = integrate_over_F(testfn, tall, testfn_tail)
    rhs = value.real / FUNDAMENTAL_AREA
    return lhs, rhs, abs(lhs - rhs)
