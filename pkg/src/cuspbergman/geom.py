"""Upper half-plane geometry for PSL2(Z).

Points are plain Python / numpy complex numbers with positive imaginary part.
Quadrature weights over the fundamental domain already include the hyperbolic
density 1/y^2, so integrands are ordinary functions of z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

SQRT3_2 = math.sqrt(3.0) / 2.0
FUNDAMENTAL_AREA = math.pi / 3.0


def as_hpoint(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.imag <= 0:
        raise ValueError(f"{z!r} is not a point of the upper half-plane")
    return z


@dataclass(frozen=True)
class MoebiusMap:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def is_identity(self) -> bool:
        # PSL2: +-1 both count
        return self.b == 0 and self.c == 0 and self.a == self.d

    def apply(self, z):
        return moebius_apply(self, z)

    def cocycle(self, z):
        """cz + d."""
        return self.c * z + self.d


IDENTITY = MoebiusMap(1, 0, 0, 1)
S = MoebiusMap(0, -1, 1, 0)
T = MoebiusMap(1, 1, 0, 1)


def T_power(n: int) -> MoebiusMap:
    return MoebiusMap(1, n, 0, 1)


def moebius_apply(m: MoebiusMap, z):
    """(az+b)/(cz+d); works on scalars and numpy arrays."""
    if np.ndim(z) == 0:
        z = as_hpoint(z)
    return (m.a * z + m.b) / (m.c * z + m.d)


def reduce_to_fundamental_domain(z, max_iter: int = 10_000) -> tuple[complex, MoebiusMap]:
    """Return (z', g) with g z = z' in the standard domain |x| <= 1/2, |z| >= 1."""
    z = as_hpoint(z)
    g = IDENTITY
    for _ in range(max_iter):
        n = math.floor(z.real + 0.5)
        if n:
            z = z - n
            g = T_power(-n) @ g
        if abs(z) ** 2 < 1.0 - 1e-15:
            z = -1.0 / z
            g = S @ g
        else:
            return z, g
    raise RuntimeError(f"fundamental domain reduction did not terminate for {z!r}")


def in_fundamental_domain(z, tol: float = 1e-12) -> bool:
    z = complex(z)
    return z.imag > 0 and abs(z.real) <= 0.5 + tol and abs(z) >= 1.0 - tol


def hyperbolic_density(z):
    return 1.0 / np.imag(z) ** 2


def hyperbolic_distance(z, w):
    z, w = np.asarray(z), np.asarray(w)
    return np.arccosh(1.0 + np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


@dataclass(frozen=True)
class TailMajorant:
    """Bound C e^{-a y} y^p on the dx dy-density |f(z)| / y^2 above the cap."""

    C: float = 0.0
    a: float = 0.0
    p: float = -2.0

    def integral(self, y_cap: float) -> float:
        """Closed-form majorant of the integral over {|x| <= 1/2, y > y_cap}."""
        C, a, p = self.C, self.a, self.p
        if C == 0.0:
            return 0.0
        if a < 0 or (a == 0 and p >= -1):
            raise ValueError(f"tail e^(-{a} y) y^{p} is not integrable")
        if a == 0:
            return C * y_cap ** (p + 1) / (-p - 1)
        if p > -1:
            upper = special.gammaincc(p + 1, a * y_cap)
            if upper > 0:
                return C * math.exp(special.gammaln(p + 1) + math.log(upper) - (p + 1) * math.log(a))
        # incomplete gamma unavailable or underflowed: y^p <= Y^p (y/Y)^p <= Y^p e^{p(y-Y)/Y}
        if p <= 0:
            return C * y_cap**p * math.exp(-a * y_cap) / a
        rate = a - p / y_cap
        if rate <= 0:
            raise ValueError("tail majorant not yet decreasing at the cap")
        return C * y_cap**p * math.exp(-a * y_cap) / rate


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor Gauss-Legendre rule over F truncated at y_cap.

    Panels are uniform in x and uniform in log y between the arc sqrt(1-x^2)
    and y_cap, so tall caps cost nothing extra near the arc.
    """

    y_cap: float
    panels: tuple[int, int]
    nodes_per_panel: int
    z: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.z.size

    @property
    def area(self) -> float:
        return float(math.fsum(self.weights))


def _panel_rule(panels: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    s = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return s, ws


def build_quadrature(y_cap: float = 12.0, panels: tuple[int, int] = (48, 48), nodes_per_panel: int = 10) -> QuadratureGrid:
    if y_cap < 1.2:
        raise ValueError("y_cap must be at least 1.2")
    px, py = panels
    if px < 1 or py < 1 or nodes_per_panel < 1:
        raise ValueError(f"invalid panel configuration {panels}, {nodes_per_panel}")
    u, wu = _panel_rule(px, nodes_per_panel)
    s, ws = _panel_rule(py, nodes_per_panel)
    x = u - 0.5
    y_low = np.sqrt(1.0 - x**2)
    span = np.log(y_cap / y_low)
    y = y_low[:, None] * np.exp(span[:, None] * s[None, :])
    # dx dy / y^2 with dy = y * span * ds
    w = wu[:, None] * ws[None, :] * span[:, None] / y
    z = x[:, None] + 1j * y
    return QuadratureGrid(float(y_cap), (px, py), nodes_per_panel, z.ravel(), w.ravel())


def integrate_over_F(f, grid: QuadratureGrid, tail: TailMajorant = TailMajorant()) -> tuple[complex, float]:
    """Integral of f against the hyperbolic measure over F.

    ``f`` is vectorised over complex arrays.  Returns the quadrature value and
    the closed-form tail bound for the region above the cap.
    """
    vals = np.asarray(f(grid.z))
    if vals.shape != grid.z.shape:
        vals = np.broadcast_to(vals, grid.z.shape)
    value = complex(np.dot(grid.weights, vals))
    return value, tail.integral(grid.y_cap)


def reduce_points(z: np.ndarray, max_iter: int = 10_000) -> np.ndarray:
    """Vectorised reduce_to_fundamental_domain (points only)."""
    z = np.array(z, dtype=complex, copy=True)
    if np.any(z.imag <= 0):
        raise ValueError("points must lie in the upper half-plane")
    for _ in range(max_iter):
        z = z - np.floor(z.real + 0.5)
        inside = np.abs(z) ** 2 < 1.0 - 1e-15
        if not inside.any():
            return z
        z[inside] = -1.0 / z[inside]
    raise RuntimeError("fundamental domain reduction did not terminate")
