"""Compact model manifolds with exact Bergman and heat kernels.

Conventions: sections of the m-th power of a positive generator, metric
weight phi with c_1 = (i/2pi) d dbar phi, and the dbar-Laplacian normalised so
that at zero curvature it is -(1/2) times the Euclidean Laplacian.  The heat
kernel is that of exp(-(2t/m) Box_m).  With these choices the curvature
eigenvalue of the generator is alpha = 2 pi / area.

* torus C/(Z + iZ), area 1: Box_m has the Landau ladder alpha m q, each level
  m-fold degenerate.
* projective line with the round metric of area 4 pi: Box_m has eigenvalues
  alpha q (m + q + 1) with multiplicity m + 2q + 1.

Both spaces are homogeneous for the bundle, so diagonal kernels are constant
and equal to the level sums divided by the area.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg
from scipy.special import gammaln

TORUS_AREA = 1.0
P1_AREA = 4.0 * math.pi
# Landau gap per unit bundle power on the unit-area torus; reproduced by torus_fd_spectrum
TORUS_LANDAU_GAP = 2.0 * math.pi


class HeatTruncationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    kind: str  # "torus" | "projective-line"
    m: int

    def __post_init__(self):
        if self.kind not in ("torus", "projective-line"):
            raise ValueError(f"unknown model {self.kind!r}")
        if self.m < 0:
            raise ValueError("bundle power must be non-negative")

    @property
    def area(self) -> float:
        return TORUS_AREA if self.kind == "torus" else P1_AREA

    @property
    def alpha(self) -> float:
        return curvature_alpha(self.kind)


def curvature_alpha(kind: str) -> float:
    """Eigenvalue of i d dbar phi against the volume form, for the generator."""
    return 2.0 * math.pi / (TORUS_AREA if kind == "torus" else P1_AREA)


@dataclass(frozen=True)
class SpectrumTruncation:
    m: int
    levels: tuple[tuple[float, int], ...]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.levels])

    @property
    def degeneracies(self) -> np.ndarray:
        return np.array([deg for _, deg in self.levels])


@dataclass(frozen=True)
class HeatValue:
    t: float
    value: float
    truncation_tail: float


# -- projective line ----------------------------------------------------------


def p1_section_norms(m: int) -> np.ndarray:
    """log ||z^j||^2 for j = 0..m: area * j! (m-j)! / (m+1)! (Beta integral)."""
    j = np.arange(m + 1)
    return math.log(P1_AREA) + gammaln(j + 1) + gammaln(m - j + 1) - gammaln(m + 2)


def p1_bergman(m: int, z) -> np.ndarray:
    """Bergman density sum_j |z^j|^2 (1+|z|^2)^{-m} / ||z^j||^2 in the affine chart."""
    if m < 0:
        raise ValueError("bundle power must be non-negative")
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    j = np.arange(m + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r2 = np.log(r2)[..., None]
        log_terms = np.where(j == 0, 0.0, j * log_r2) - m * np.log1p(r2)[..., None] - p1_section_norms(m)
    top = log_terms.max(axis=-1, keepdims=True)
    return np.exp(top[..., 0]) * np.exp(log_terms - top).sum(axis=-1)


def p1_spectrum(m: int, Q: int) -> SpectrumTruncation:
    a = curvature_alpha("projective-line")
    return SpectrumTruncation(m, tuple((a * q * (m + q + 1), m + 2 * q + 1) for q in range(Q + 1)))


# -- torus ----------------------------------------------------------------------


def torus_spectrum(m: int, Q: int) -> SpectrumTruncation:
    if m < 1 or Q < 1:
        raise ValueError("need m >= 1 and Q >= 1")
    return SpectrumTruncation(m, tuple((TORUS_LANDAU_GAP * m * q, m) for q in range(Q + 1)))


def torus_bergman(m: int) -> float:
    return m / TORUS_AREA


def torus_fd_spectrum(m: int, N: int = 64, count: int | None = None) -> np.ndarray:
    """Lowest eigenvalues of Box_m from a lattice discretisation of the torus.

    The magnetic Laplacian -(grad - iA)^2 with field B = 2 pi m (flux m) is
    discretised with Peierls phases on an N x N periodic grid, gauge A = (0, Bx)
    with the compensating transition phase across x = 1.  Box_m is then
    (H - B) / 2 by the Bochner-Kodaira identity for sections.
    """
    count = count or 4 * m
    h = 1.0 / N
    B = 2.0 * math.pi * m
    idx = np.arange(N * N).reshape(N, N)  # idx[jx, jy]
    jx, jy = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    # y-links carry exp(i B x h); x-links are trivial except the wrap, which carries exp(-i B y)
    phase_y = np.exp(1j * B * (jx * h) * h)
    phase_x = np.where(jx == N - 1, np.exp(-1j * B * (jy * h)), 1.0)
    rows = np.concatenate([idx.ravel(), idx.ravel()])
    cols = np.concatenate([np.roll(idx, -1, axis=0).ravel(), np.roll(idx, -1, axis=1).ravel()])
    vals = np.concatenate([phase_x.ravel(), phase_y.ravel()])
    hop = sparse.coo_matrix((vals, (rows, cols)), shape=(N * N, N * N)).tocsr()
    H = (4.0 * sparse.identity(N * N) - hop - hop.conj().T) / h**2
    ev = splinalg.eigsh(H.tocsc(), k=count, sigma=0.0, which="LM", return_eigenvectors=False)
    return np.sort((ev.real - B) / 2.0)


# -- heat kernels ----------------------------------------------------------------


def _level_sum(spec: SpectrumTruncation, t: float, area: float) -> float:
    lam, deg = spec.eigenvalues, spec.degeneracies
    return float(np.sum(deg * np.exp(-(2.0 * t / spec.m) * lam))) / area


def torus_heat_kernel(m: int, t: float, Q: int, z=0j, tol: float = 1e-12) -> HeatValue:
    """Diagonal of exp(-(2t/m) Box_m) at z (constant by translation invariance)."""
    if t <= 0:
        raise ValueError("t must be positive")
    spec = torus_spectrum(m, Q)
    ratio = math.exp(-2.0 * t * TORUS_LANDAU_GAP)
    tail = m * ratio ** (Q + 1) / (1.0 - ratio) / TORUS_AREA
    if tail > tol:
        raise HeatTruncationError(f"torus heat tail {tail:.3g} above {tol:.3g}; increase Q")
    return HeatValue(t, _level_sum(spec, t, TORUS_AREA), tail)


def p1_heat_kernel(m: int, t: float, Q: int, tol: float = 1e-12) -> HeatValue:
    if t <= 0 or m < 1:
        raise ValueError("need t > 0 and m >= 1")
    spec = p1_spectrum(m, Q)
    a = curvature_alpha("projective-line")
    # term_q <= (m+2q+1) exp(-2ta q (1 + (q+1)/m)); successive ratio below exp(-2ta(1 + 2(Q+1)/m))
    ratio = math.exp(-2.0 * t * a * (1.0 + 2.0 * (Q + 1) / m)) * (1.0 + 2.0 / (m + 2 * Q + 3))
    first = (m + 2 * Q + 3) * math.exp(-(2.0 * t / m) * a * (Q + 1) * (m + Q + 2))
    if ratio >= 1:
        raise HeatTruncationError("level sum tail not yet geometric; increase Q")
    tail = first / (1.0 - ratio) / P1_AREA
    if tail > tol:
        raise HeatTruncationError(f"projective-line heat tail {tail:.3g} above {tol:.3g}; increase Q")
    return HeatValue(t, _level_sum(spec, t, P1_AREA), tail)


def heat_kernel(spec: ModelSpec, t: float, Q: int, tol: float = 1e-12) -> HeatValue:
    if spec.kind == "torus":
        return torus_heat_kernel(spec.m, t, Q, tol=tol)
    return p1_heat_kernel(spec.m, t, Q, tol=tol)


def model_bergman(spec: ModelSpec) -> float:
    if spec.kind == "torus":
        return torus_bergman(spec.m)
    return float(p1_bergman(spec.m, 0.3 + 0.1j))


def levels_needed(kind: str, t: float, tol: float = 1e-12) -> int:
    """Q large enough that the level tail is below tol for any m at time t."""
    rate = 2.0 * t * curvature_alpha(kind)
    return max(4, int(math.ceil((-math.log(tol) + 10.0) / rate)) + 4)


# -- Bouche comparison -------------------------------------------------------------


def bouche_rhs(alpha: float, t: float) -> float:
    """alpha / (4 pi sinh(alpha t)); 1/(4 pi t) at alpha = 0."""
    if t <= 0:
        raise ValueError("t must be positive")
    x = alpha * t
    if abs(x) < 1e-8:
        return 1.0 / (4.0 * math.pi * t) * (1.0 - x * x / 6.0)
    return alpha / (4.0 * math.pi * math.sinh(x))


@dataclass(frozen=True)
class BoucheRow:
    kind: str
    m: int
    t: float
    heat: float
    bergman: float
    bouche_rhs: float
    rel_err: float
    rel_err_shifted: float
    tail: float


def verify_bouche_limit(kind: str, t: float, m_list, Q: int | None = None) -> list[BoucheRow]:
    """Compare (1/m) hk_m(t) with alpha / (4 pi sinh(alpha t)).

    ``rel_err`` is the literal comparison.  ``rel_err_shifted`` removes the
    lowest-level offset, comparing e^{-alpha t} (1/m) hk_m(t); the Laplacian here
    vanishes on holomorphic sections, while the sinh profile is the Mehler
    kernel of the magnetic Laplacian, which sits alpha/2 per unit m higher.
    """
    Q = Q or levels_needed(kind, t)
    alpha = curvature_alpha(kind)
    rhs = bouche_rhs(alpha, t)
    rows = []
    for m in m_list:
        spec = ModelSpec(kind, m)
        hv = heat_kernel(spec, t, Q)
        scaled = hv.value / m
        rows.append(
            BoucheRow(
                kind, m, t, hv.value, model_bergman(spec), rhs,
                abs(scaled - rhs) / rhs,
                abs(math.exp(-alpha * t) * scaled - rhs) / rhs,
                hv.truncation_tail,
            )
        )
    return rows
