"""Petersson inner products, Gram matrices and Cholesky whitening."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .forms import FormBasis, QExpansion, petersson_values
from .geom import QuadratureGrid, TailMajorant, build_quadrature

TWO_PI = 2.0 * math.pi
COND_LIMIT = 1e10
ORTHO_RESIDUAL_LIMIT = 1e-8


class GramNotPDError(np.linalg.LinAlgError):
    pass


class ConditioningError(np.linalg.LinAlgError):
    pass


def cusp_cap(forms, rel: float = 1e-18, floor: float = 12.0) -> float:
    """Truncation height above which the Petersson mass of every form is below rel of its peak.

    The density y^{k-2} e^{-4 pi l y} of the slowest-decaying member is
    integrated past the cap in closed form; the cap is raised until the tail
    is negligible against the mass near the density's maximum.
    """
    k = float(forms[0].weight)
    lead = min(float(f.lead_exp) for f in forms)
    a = 2.0 * TWO_PI * lead
    p = k - 2.0
    y_peak = max(p / a, 1.0)
    peak = TailMajorant(1.0, a, p)
    ref = peak.integral(y_peak) - peak.integral(y_peak + max(1.0, math.sqrt(max(p, 1.0)) / a))
    y = floor
    while peak.integral(y) > rel * ref:
        y *= 1.1
    return y


def default_grid(forms, panels=(48, 48), nodes=10, y_cap: float | None = None) -> QuadratureGrid:
    return build_quadrature(y_cap or cusp_cap(forms), panels, nodes)


def _cusp_majorant(f: QExpansion, g: QExpansion, y_cap: float) -> TailMajorant:
    """Majorant of y^{k-2} |f g| above y_cap from the coefficient sums at the cap."""
    def norm_at_cap(h):
        idx = np.arange(h.trunc)
        log_terms = h._log_abs - TWO_PI * y_cap * idx
        s = float(np.exp(log_terms - log_terms.max()).sum()) * math.exp(log_terms.max())
        return s + math.exp(h.log_tail_bound(y_cap))

    C = norm_at_cap(f) * norm_at_cap(g)
    a = TWO_PI * float(f.lead_exp + g.lead_exp)
    return TailMajorant(C, a, float(f.weight) - 2.0)


def petersson_inner(f: QExpansion, g: QExpansion, grid: QuadratureGrid) -> complex:
    """<f, g> = int_F f conj(g) y^k dmu_hyp."""
    if f.weight != g.weight:
        raise ValueError(f"weight mismatch {f.weight} vs {g.weight}")
    v = petersson_values([f, g], grid.z)
    return complex(np.dot(grid.weights, v[0] * np.conj(v[1])))


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian Petersson Gram matrix.

    ``tail`` bounds |G_ij - exact| / sqrt(G_ii G_jj) from the part of F above the cap.
    """

    entries: np.ndarray
    weight: object
    grid: QuadratureGrid = field(repr=False)
    tail: float = 0.0
    precision: int = 53

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def scaled(self) -> np.ndarray:
        """Unit-diagonal (Jacobi-scaled) Gram matrix."""
        d = 1.0 / np.sqrt(np.real(np.diag(self.entries)))
        return self.entries * d[:, None] * d[None, :]

    @property
    def cond(self) -> float:
        """Condition number of the unit-diagonal Gram matrix."""
        if self.dim == 0:
            return 1.0
        return float(np.linalg.cond(self.scaled))

    @property
    def raw_cond(self) -> float:
        if self.dim == 0:
            return 1.0
        return float(np.linalg.cond(self.entries))


def _dtype(precision: int):
    return np.clongdouble if precision > 53 else np.complex128


def gram_matrix(basis: FormBasis, grid: QuadratureGrid, precision: int = 53) -> GramMatrix:
    """G[i, j] = <b_i, b_j>, each member evaluated once per node."""
    d = len(basis)
    if d == 0:
        return GramMatrix(np.zeros((0, 0), dtype=complex), basis.weight, grid, 0.0, precision)
    v = petersson_values(basis.members, grid.z, dtype=_dtype(precision))
    G = (v * grid.weights) @ v.conj().T
    G = 0.5 * (G + G.conj().T)
    diag = np.real(np.diag(G))
    tail = 0.0
    for i, f in enumerate(basis.members):
        for j in range(i, d):
            t_ij = _cusp_majorant(f, basis.members[j], grid.y_cap).integral(grid.y_cap)
            tail = max(tail, t_ij / math.sqrt(diag[i] * diag[j]))
    return GramMatrix(G, basis.weight, grid, tail, precision)


@dataclass(frozen=True)
class OrthoBasis:
    weight: object
    raw: FormBasis
    transform: np.ndarray
    gram: GramMatrix = field(repr=False)
    residual: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.raw)

    def values(self, z) -> np.ndarray:
        """Petersson-scaled values y^{k/2} f_i(z) of the orthonormal members."""
        return self.transform @ petersson_values(self.raw.members, z, dtype=_dtype(self.gram.precision))


def orthonormalize(basis: FormBasis, G: GramMatrix, cond_limit: float = COND_LIMIT) -> OrthoBasis:
    """A = L^{-1} from G = L L^H (after Jacobi scaling), so A G A^H = I."""
    d = len(basis)
    if d == 0:
        return OrthoBasis(basis.weight, basis, np.zeros((0, 0), dtype=complex), G, 0.0)
    diag = np.real(np.diag(G.entries))
    if np.any(diag <= 0):
        raise GramNotPDError(f"weight {basis.weight}: Gram matrix has non-positive diagonal")
    cond = G.cond
    if not cond < cond_limit:
        raise ConditioningError(f"weight {basis.weight}: Gram condition number {cond:.3g} exceeds {cond_limit:.1g}")
    D = 1.0 / np.sqrt(diag)
    try:
        L = linalg.cholesky(G.scaled, lower=True)
    except linalg.LinAlgError as err:
        raise GramNotPDError(f"weight {basis.weight}: Gram matrix is not positive definite") from err
    A = linalg.solve_triangular(L, np.diag(D).astype(complex), lower=True)
    residual = float(np.max(np.abs(A @ G.entries @ A.conj().T - np.eye(d))))
    if residual > ORTHO_RESIDUAL_LIMIT:
        raise GramNotPDError(f"weight {basis.weight}: orthonormality residual {residual:.3g}")
    return OrthoBasis(basis.weight, basis, A, G, residual)


def gram_schmidt(basis: FormBasis, G: GramMatrix) -> np.ndarray:
    """Modified Gram-Schmidt in the G inner product; returns the transform matrix.

    Independent of the Cholesky route, used to cross-check basis invariance.
    """
    d = len(basis)
    A = np.eye(d, dtype=complex)
    M = G.entries

    def inner(r, s):
        # <sum r_l b_l, sum s_m b_m>
        return r @ M @ s.conj()

    for i in range(d):
        for j in range(i):
            A[i] = A[i] - inner(A[i], A[j]) * A[j]
        A[i] = A[i] / math.sqrt(float(np.real(inner(A[i], A[i]))))
    return A
