"""Exact q-expansions of level-one modular forms and eta quotients.

Series are built with exact integer (or rational) arithmetic and evaluated in
floating point.  Every expansion carries a coefficient-growth envelope
``|a_n| <= C n^k`` fitted on its stored coefficients, from which truncation
tail bounds are derived.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import mpmath
import numpy as np

from .geom import as_hpoint

TWO_PI = 2.0 * math.pi
# lowest height at which the pipeline evaluates (reduced points lie above sqrt(3)/2)
Y_MIN_REDUCED = 0.85
# float coefficients are stored rescaled by RHO_REF^n to keep them representable
_Y_REF = 0.25
_LOG_RHO_REF = -TWO_PI * _Y_REF


class TruncationError(ArithmeticError):
    """The stored expansion is too short for the requested accuracy."""

    def __init__(self, message: str, needed: int):
        super().__init__(message)
        self.needed = needed


def parse_weight(k) -> Fraction:
    """Accepts 12, '12', '25/2', Fraction(25, 2); floats only if exactly representable."""
    if isinstance(k, Fraction):
        w = k
    elif isinstance(k, int):
        w = Fraction(k)
    elif isinstance(k, str):
        w = Fraction(k.strip())
    elif isinstance(k, float) and (2 * k).is_integer():
        w = Fraction(k)
    else:
        raise ValueError(f"cannot interpret weight {k!r}")
    if (2 * w).denominator != 1:
        raise ValueError(f"weight {w} is not a half-integer")
    return w


def format_weight(k: Fraction) -> str:
    return str(k.numerator) if k.denominator == 1 else f"{k.numerator}/{k.denominator}"


# ---------------------------------------------------------------------------
# exact series arithmetic on object arrays


def _series(values, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=object)
    out[:] = 0
    vals = list(values)[:n]
    out[: len(vals)] = vals
    return out


def _mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a[:n], b[:n])[:n]


def _pow(a: np.ndarray, e: int, n: int) -> np.ndarray:
    result = _series([1], n)
    base = a[:n]
    while e:
        if e & 1:
            result = _mul(result, base, n)
        e >>= 1
        if e:
            base = _mul(base, base, n)
    return result


def _inverse(a: np.ndarray, n: int) -> np.ndarray:
    """1/a for a power series with unit constant term."""
    if a[0] not in (1, -1):
        raise ValueError("series inverse needs a unit constant term")
    inv = _series([], n)
    inv[0] = a[0]
    for i in range(1, n):
        acc = 0
        for j in range(1, i + 1):
            if a[j]:
                acc += a[j] * inv[i - j]
        inv[i] = -acc * a[0]
    return inv


def _divisor_sums(n: int, p: int) -> list[int]:
    sig = [0] * n
    for d in range(1, n):
        dp = d**p
        for m in range(d, n, d):
            sig[m] += dp
    return sig


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = -1/2)."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return b[n]


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QExpansion:
    """f = sum_i coeffs[i] q^(lead_exp + i), q = e^{2 pi i z}."""

    weight: Fraction
    lead_exp: Fraction
    coeffs: tuple
    multiplier_unimodular: bool = True
    name: str = ""

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("an expansion needs at least one stored term")
        if (self.lead_exp * 24).denominator != 1:
            raise ValueError("leading exponent must be a multiple of 1/24")

    @property
    def trunc(self) -> int:
        return len(self.coeffs)

    @property
    def is_cuspidal(self) -> bool:
        return self.lead_exp > 0

    def coefficient(self, exponent) -> Fraction | int:
        i = Fraction(exponent) - self.lead_exp
        if i.denominator != 1 or i < 0:
            return 0
        if i >= self.trunc:
            raise IndexError(f"q^{exponent} lies beyond the stored {self.trunc} terms")
        return self.coeffs[int(i)]

    # -- envelope and tail bounds -------------------------------------------

    @cached_property
    def _log_abs(self) -> np.ndarray:
        return np.array([math.log(abs(c)) if c else -np.inf for c in self.coeffs])

    @cached_property
    def _exponents(self) -> np.ndarray:
        return float(self.lead_exp) + np.arange(self.trunc, dtype=float)

    @cached_property
    def envelope(self) -> tuple[float, float]:
        """(log C, p) with |a_n| <= C n^p on the stored terms of positive exponent, C doubled."""
        p = max(float(self.weight), 1.0)
        n = self._exponents
        mask = (n > 0) & np.isfinite(self._log_abs)
        if not mask.any():
            return -np.inf, p
        return float(np.max(self._log_abs[mask] - p * np.log(n[mask])) + math.log(2.0)), p

    def log_tail_bound(self, y: float, terms: int | None = None) -> float:
        """log of a bound on sum_{n beyond the first ``terms``} |a_n| |q|^n at height y."""
        terms = self.trunc if terms is None else terms
        log_c, p = self.envelope
        if log_c == -np.inf:
            return -np.inf
        n0 = float(self.lead_exp) + terms
        if n0 <= 0:
            return np.inf
        log_r = -TWO_PI * y
        ratio = p * math.log1p(1.0 / n0) + log_r
        if ratio >= 0:
            return np.inf
        return log_c + p * math.log(n0) + n0 * log_r - math.log(-math.expm1(ratio))

    def log_scale(self, y: float, terms: int | None = None) -> float:
        """log of the largest single term |a_n| |q|^n among the first ``terms``."""
        terms = self.trunc if terms is None else terms
        return float(np.max(self._log_abs[:terms] - TWO_PI * y * self._exponents[:terms]))

    def terms_needed(self, y: float, rtol: float = 1e-17) -> int:
        """Smallest count of leading terms whose tail at height y is below rtol * scale."""
        target = self.log_scale(y) + math.log(rtol)
        if self.log_tail_bound(y) > target:
            raise TruncationError(
                f"{self.name or 'expansion'}: {self.trunc} terms insufficient at y={y:.4g}",
                needed=self._extrapolate_needed(y, target),
            )
        lo, hi = 1, self.trunc
        while lo < hi:
            mid = (lo + hi) // 2
            if self.log_tail_bound(y, mid) <= target:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def _extrapolate_needed(self, y: float, target: float) -> int:
        n = self.trunc
        while self.log_tail_bound(y, n) > target:
            n = int(n * 1.25) + 8
            if n > 100_000:
                break
        return n

    # -- evaluation ---------------------------------------------------------

    @cached_property
    def _scaled_coeffs(self) -> np.ndarray:
        """a_n * rho_ref^n as floats (sign * exp(log|a_n| + n log rho_ref))."""
        idx = np.arange(self.trunc)
        signs = np.array([(c > 0) - (c < 0) for c in self.coeffs], dtype=float)
        with np.errstate(invalid="ignore"):
            mag = np.exp(self._log_abs + idx * _LOG_RHO_REF)
        return np.where(signs == 0, 0.0, signs * mag)

    def series_values(self, z: np.ndarray, terms: int, dtype=np.complex128) -> np.ndarray:
        """sum_{i < terms} a_i q^i (the part after the q^lead factor), by Horner."""
        z = np.asarray(z, dtype=dtype)
        u = np.exp(2j * np.pi * z - _LOG_RHO_REF)
        c = self._scaled_coeffs[:terms].astype(np.longdouble if dtype == np.clongdouble else float)
        acc = np.zeros_like(u)
        for coef in c[::-1]:
            acc = acc * u + coef
        return acc

    def to_json(self) -> str:
        return json.dumps(
            {
                "weight": format_weight(self.weight),
                "lead_exp": f"{self.lead_exp * 24}/24",
                "coeffs": [str(c) for c in self.coeffs],
                "trunc": self.trunc,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "QExpansion":
        d = json.loads(text)
        num = d["lead_exp"].split("/")
        lead = Fraction(int(num[0]), int(num[1]) if len(num) > 1 else 1)
        coeffs = tuple(Fraction(c) if "/" in c else int(c) for c in d["coeffs"])
        return cls(parse_weight(d["weight"]), lead, coeffs)


def evaluate_form(f: QExpansion, z, tol: float | None = None, precision: int = 53) -> tuple[complex, float]:
    """Point value f(z) and a bound on the truncation error.

    ``tol`` is an absolute tolerance on that bound; exceeding it raises
    TruncationError carrying the number of terms required.  ``precision`` in
    bits; above 64 the sum is done with mpmath.
    """
    z = as_hpoint(z)
    y = z.imag
    log_tail = f.log_tail_bound(y)
    tail = math.exp(float(f.lead_exp) * -TWO_PI * y + log_tail) if log_tail < 700 else math.inf
    if tol is not None and tail > tol:
        target = math.log(tol) + TWO_PI * y * float(f.lead_exp)
        raise TruncationError(f"tail bound {tail:.3g} exceeds {tol:.3g} at y={y:.4g}", f._extrapolate_needed(y, target))
    if precision > 64:
        with mpmath.workprec(precision):
            zz = mpmath.mpc(z)
            q = mpmath.exp(2j * mpmath.pi * zz)
            acc = mpmath.mpc(0)
            for c in reversed(f.coeffs):
                acc = acc * q + (mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else c)
            value = complex(acc * mpmath.exp(2j * mpmath.pi * zz * mpmath.mpf(f.lead_exp.numerator) / f.lead_exp.denominator))
        return value, tail
    dtype = np.clongdouble if precision > 53 else np.complex128
    part = f.series_values(np.array([z]), f.trunc, dtype=dtype)[0]
    lead = np.exp(2j * np.pi * np.asarray(z, dtype=dtype) * float(f.lead_exp))
    return complex(part * lead), tail


def petersson_values(forms, z: np.ndarray, rtol: float = 1e-17, dtype=np.complex128) -> np.ndarray:
    """Matrix of y^{k/2} f(z) for each form (rows) at each point (columns).

    Points are processed in height-sorted blocks so high points use short
    partial sums; raises TruncationError if any block needs more terms than stored.
    """
    z = np.asarray(z, dtype=complex).ravel()
    out = np.zeros((len(forms), z.size), dtype=complex)
    if z.size == 0 or not forms:
        return out
    order = np.argsort(z.imag, kind="stable")
    blocks = np.array_split(order, max(1, z.size // 4096))
    for row, f in enumerate(forms):
        half_k = 0.5 * float(f.weight)
        lead = float(f.lead_exp)
        for blk in blocks:
            zb = z[blk]
            terms = f.terms_needed(float(zb.imag.min()), rtol)
            part = f.series_values(zb, terms, dtype=dtype)
            # y^{k/2} q^lead with the modulus combined in log space
            log_mod = half_k * np.log(zb.imag) - TWO_PI * lead * zb.imag
            phase = np.exp(1j * TWO_PI * lead * zb.real)
            out[row, blk] = (part * np.exp(log_mod) * phase).astype(complex)
    return out


# ---------------------------------------------------------------------------
# constructors


@lru_cache(maxsize=None)
def _eisenstein_coeffs(weight: int, trunc: int) -> tuple:
    factor = -Fraction(2 * weight) / bernoulli(weight)
    assert factor.denominator == 1
    sig = _divisor_sums(trunc, weight - 1)
    return (1,) + tuple(int(factor) * s for s in sig[1:])


def eisenstein_series(weight: int, trunc: int) -> QExpansion:
    """Normalised Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if trunc < 2:
        raise ValueError("trunc must be at least 2")
    if weight not in (4, 6):
        raise ValueError(f"Eisenstein generator of weight {weight} not supported (use 4 or 6)")
    return QExpansion(Fraction(weight), Fraction(0), _eisenstein_coeffs(weight, trunc), name=f"E{weight}")


def _e(weight: int, n: int) -> np.ndarray:
    return _series(_eisenstein_coeffs(weight, n), n)


@lru_cache(maxsize=None)
def _delta_over_q(n: int) -> tuple:
    """Delta / q = prod (1-q^n)^24, via (E4^3 - E6^2)/1728."""
    m = n + 1
    num = _pow(_e(4, m), 3, m) - _pow(_e(6, m), 2, m)
    assert num[0] == 0 and all(c % 1728 == 0 for c in num)
    return tuple(c // 1728 for c in num[1:])


def delta_series(trunc: int) -> QExpansion:
    if trunc < 1:
        raise ValueError("trunc must be at least 1")
    return QExpansion(Fraction(12), Fraction(1), _delta_over_q(trunc), name="Delta")


@lru_cache(maxsize=None)
def euler_product(n: int) -> tuple:
    """prod_{m>=1} (1 - q^m) = sum (-1)^j q^{j(3j-1)/2} over all integers j."""
    c = [0] * n
    j = 0
    while True:
        hit = False
        for jj in ((j, -j) if j else (0,)):
            e = jj * (3 * jj - 1) // 2
            if e < n:
                c[e] += -1 if jj % 2 else 1
                hit = True
        if not hit:
            break
        j += 1
    return tuple(c)


def eta_power_series(m: int, trunc: int) -> QExpansion:
    """eta^m = q^{m/24} prod (1-q^n)^m, weight m/2."""
    if m < 1:
        raise ValueError("eta power must be positive")
    coeffs = _pow(_series(euler_product(trunc), trunc), m, trunc)
    return QExpansion(Fraction(m, 2), Fraction(m, 24), tuple(coeffs), name=f"eta^{m}")


@lru_cache(maxsize=None)
def _qj(n: int) -> tuple:
    """q * j = E4^3 / (Delta / q)."""
    e43 = _pow(_e(4, n), 3, n)
    return tuple(_mul(e43, _inverse(_series(_delta_over_q(n), n), n), n))


def j_series(trunc: int) -> QExpansion:
    if trunc < 2:
        raise ValueError("trunc must be at least 2")
    return QExpansion(Fraction(0), Fraction(-1), _qj(trunc), multiplier_unimodular=True, name="j")


# ---------------------------------------------------------------------------
# cusp form bases


def cusp_dimension(k) -> int:
    """dim S_k(PSL2(Z)) for even k; size of the eta^{2k} j^m family for 2k odd."""
    k = parse_weight(k)
    if k < 0:
        raise ValueError("negative weight")
    if k.denominator == 2:
        # m >= 0 with 2k/24 - m > 0; 2k/24 is never an integer here
        return math.floor(2 * k / 24) + 1
    k = int(k)
    if k % 2:
        raise ValueError("odd integral weight has no level-one cusp forms with trivial multiplier")
    if k < 12:
        return 0
    return k // 12 - (1 if k % 12 == 2 else 0)


@dataclass(frozen=True)
class FormBasis:
    weight: Fraction
    members: tuple[QExpansion, ...]
    kind: str  # "integral-echelon" | "half-integral-eta-family"

    def __len__(self) -> int:
        return len(self.members)

    @property
    def lead_exps(self) -> list[Fraction]:
        return [f.lead_exp for f in self.members]


def _monomial(r: int, n: int) -> np.ndarray:
    """E4^a E6^b with 4a + 6b = r (smallest b)."""
    for b in range(r // 6 + 1):
        if (r - 6 * b) % 4 == 0:
            return _mul(_pow(_e(4, n), (r - 6 * b) // 4, n), _pow(_e(6, n), b, n), n)
    raise ValueError(f"no monomial of weight {r}")


def miller_cusp_basis(k: int, trunc: int) -> FormBasis:
    """Echelon basis f_j = q^j + O(q^{d+1}) of S_k(PSL2(Z)), j = 1..d."""
    k = parse_weight(k)
    if k.denominator != 1 or int(k) % 2 or k < 0:
        raise ValueError(f"weight {k} is not a non-negative even integer")
    k = int(k)
    d = cusp_dimension(k)
    if d == 0:
        return FormBasis(Fraction(k), (), "integral-echelon")
    n = max(trunc, d + 1) + 1  # index = exponent; slot 0 stays zero
    dq = _series((0,) + _delta_over_q(n - 1), n)
    rows = []
    power = _series([1], n)
    for j in range(1, d + 1):
        power = _mul(power, dq, n)
        rows.append(_mul(power, _monomial(k - 12 * j, n), n))
    # back substitution: clear q^{j'} in row j for j' > j; pivots are 1 so it stays integral
    for i in range(d - 2, -1, -1):
        for j in range(i + 1, d):
            c = rows[i][j + 1]
            if c:
                rows[i] = rows[i] - c * rows[j]
    members = tuple(
        QExpansion(Fraction(k), Fraction(j + 1), tuple(rows[j][j + 1 : j + 1 + trunc]), name=f"f{j + 1}[k={k}]")
        for j in range(d)
    )
    return FormBasis(Fraction(k), members, "integral-echelon")


def half_integral_cusp_family(k, trunc: int) -> FormBasis:
    """eta^{2k} j^m, m = 0..M, all with positive order 2k/24 - m at the cusp."""
    k = parse_weight(k)
    if k.denominator != 2:
        raise ValueError(f"weight {k} is integral; use miller_cusp_basis")
    if k < Fraction(1, 2):
        raise ValueError("weight must be at least 1/2")
    two_k = int(2 * k)
    count = cusp_dimension(k)
    eta = _pow(_series(euler_product(trunc), trunc), two_k, trunc)
    qj = _series(_qj(trunc), trunc)
    members = []
    acc = eta
    for m in range(count):
        if m:
            acc = _mul(acc, qj, trunc)
        members.append(
            QExpansion(k, Fraction(two_k, 24) - m, tuple(acc), name=f"eta^{two_k} j^{m}")
        )
    return FormBasis(k, tuple(members), "half-integral-eta-family")


def cusp_basis(k, trunc: int | None = None, y_min: float = Y_MIN_REDUCED) -> FormBasis:
    """Basis for weight k by parity of 2k, with truncation grown until adequate at y_min."""
    k = parse_weight(k)
    build = half_integral_cusp_family if k.denominator == 2 else miller_cusp_basis
    if trunc is not None:
        return build(k, trunc)
    n = 40 + 2 * math.ceil(k)
    for _ in range(8):
        basis = build(k, n)
        try:
            for f in basis.members:
                f.terms_needed(y_min)
            return basis
        except TruncationError as err:
            n = max(err.needed + 8, n + 16)
    raise TruncationError(f"could not size expansions for weight {k}", n)
