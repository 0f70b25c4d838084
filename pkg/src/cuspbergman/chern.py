"""First Chern forms of Petersson metrics on the upper half-plane.

A weight-w Petersson metric has weight function phi(z) = -w log y, so that
e^{-phi} |f|^2 = y^w |f|^2.  Its Chern form (i/2pi) d dbar phi is reported as
the scalar c with c_1 = c * mu_hyp, mu_hyp = (i/2) dz ^ dzbar / y^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .geom import as_hpoint


@dataclass(frozen=True)
class MetricWeight:
    w: Fraction

    def phi(self, z: complex) -> float:
        return -float(self.w) * math.log(z.imag)

    def norm_sq(self, f_value: complex, z: complex) -> float:
        return math.exp(-self.phi(z)) * abs(f_value) ** 2


@dataclass(frozen=True)
class ChernDensity:
    z: complex
    value_mu_hyp: float


def _laplacian(phi, z: complex, h: float) -> float:
    """5-point Euclidean Laplacian of phi at z."""
    c = phi(z)
    return (phi(z + h) + phi(z - h) + phi(z + 1j * h) + phi(z - 1j * h) - 4.0 * c) / h**2


def chern_density_numeric(m: MetricWeight, z, h: float | None = None, richardson: bool = True) -> ChernDensity:
    """Finite-difference c with c_1(z) = c mu_hyp.

    d dbar phi = (1/4) Lap(phi) dz ^ dzbar, and (i/2pi)(1/4) dz ^ dzbar = (y^2 / 4pi) mu_hyp,
    so c = y^2 Lap(phi) / (4 pi).  With ``richardson`` the h and h/2 stencils are
    combined to cancel the h^2 error term.
    """
    z = as_hpoint(z)
    h = z.imag / 100.0 if h is None else h
    if not 0 < h < z.imag / 4:
        raise ValueError(f"step {h} must lie in (0, y/4) at y={z.imag}")
    lap = _laplacian(m.phi, z, h)
    if richardson:
        lap = (4.0 * _laplacian(m.phi, z, h / 2) - lap) / 3.0
    return ChernDensity(z, z.imag**2 * lap / (4.0 * math.pi))


def chern_density_closed(w) -> float:
    """Exact multiple of mu_hyp: w / (4 pi)."""
    return float(w) / (4.0 * math.pi)


def berman_predicted_ratio(w, power_per_k) -> float:
    """Predicted limsup of B_k(z)/k when weight k corresponds to the tensor power power_per_k * k.

    In complex dimension one det_omega c_1 is the scalar density itself.
    """
    if not w > 0:
        raise ValueError(f"metric weight {w} is not positive; the line bundle must be positive")
    return float(power_per_k) * chern_density_closed(w)


def convergence_order(w, z, h: float, levels: int = 3) -> float:
    """Observed order of the plain (non-extrapolated) stencil under step halving."""
    m = MetricWeight(Fraction(w))
    exact = chern_density_closed(w)
    errs = [abs(chern_density_numeric(m, z, h / 2**i, richardson=False).value_mu_hyp - exact) for i in range(levels)]
    ratios = [math.log2(errs[i] / errs[i + 1]) for i in range(levels - 1)]
    return ratios[-1]
