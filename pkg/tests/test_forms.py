import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cuspbergman.forms import (
    QExpansion,
    TruncationError,
    cusp_basis,
    cusp_dimension,
    delta_series,
    eisenstein_series,
    eta_power_series,
    evaluate_form,
    half_integral_cusp_family,
    j_series,
    miller_cusp_basis,
    parse_weight,
    petersson_values,
)

N = 30


def list_mul(a, b, n=N):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def list_pow(a, e, n=N):
    out = [1] + [0] * (n - 1)
    for _ in range(e):
        out = list_mul(out, a, n)
    return out


@pytest.fixture(scope="module")
def sym():
    e4 = [1] + [240 * int(sympy.divisor_sigma(m, 3)) for m in range(1, N)]
    e6 = [1] + [-504 * int(sympy.divisor_sigma(m, 5)) for m in range(1, N)]
    # q prod (1 - q^m)^24 one factor at a time
    d = [0, 1] + [0] * (N - 2)
    for m in range(1, N):
        factor = [0] * N
        factor[0] = 1
        factor[m] = -1
        d = list_mul(d, list_pow(factor, 24))
    return {"E4": e4, "E6": e6, "Delta": d}


def test_eisenstein_against_divisor_sums(sym):
    assert list(eisenstein_series(4, N).coeffs) == sym["E4"]
    assert list(eisenstein_series(6, N).coeffs) == sym["E6"]


def test_delta_against_product(sym):
    d = delta_series(N - 1)
    assert d.lead_exp == 1
    assert list(d.coeffs) == sym["Delta"][1:]
    assert d.coeffs[:8] == (1, -24, 252, -1472, 4830, -6048, -16744, 84480)


def test_delta_is_eta_24():
    assert eta_power_series(24, 200).coeffs == delta_series(200).coeffs


def test_eta_pentagonal():
    c = eta_power_series(1, 60).coeffs
    pent = {n * (3 * n - 1) // 2: (-1) ** n for n in range(-10, 11)}
    assert c == tuple(pent.get(i, 0) for i in range(60))


def test_j_expansion():
    j = j_series(6)
    assert j.lead_exp == -1
    assert j.coeffs[:4] == (1, 744, 196884, 21493760)


def test_miller_echelon_against_list_oracle(sym):
    # S_24 is spanned by Delta E4^3 and Delta^2; row-reduce independently
    d, e4 = sym["Delta"], sym["E4"]
    a = list_mul(d, list_pow(e4, 3))
    b = list_mul(d, d)
    f2 = b
    f1 = [x - a[2] * y for x, y in zip(a, b)]
    basis = miller_cusp_basis(24, N)
    assert list(basis.members[0].coeffs[:N - 1]) == f1[1:]
    assert list(basis.members[1].coeffs[:N - 2]) == f2[2:]
    assert basis.members[0].coeffs[:4] == (1, 0, 195660, 12080128)


@pytest.mark.parametrize("k", [12, 24, 36, 48, 60, 72])
def test_miller_echelon_shape(k):
    b = miller_cusp_basis(k, 40)
    d = len(b)
    for j, f in enumerate(b.members, start=1):
        assert f.lead_exp == j and f.coeffs[0] == 1
        for jj in range(j + 1, d + 1):
            assert f.coefficient(jj) == 0


@pytest.mark.parametrize(
    "k, d",
    [(0, 0), (10, 0), (12, 1), (14, 0), (24, 2), (26, 1), (36, 3), (38, 2), (120, 10), (122, 9),
     ("1/2", 1), ("25/2", 2), ("49/2", 3), ("73/2", 4), ("97/2", 5), ("121/2", 6)],
)
def test_dimensions(k, d):
    assert cusp_dimension(k) == d
    if parse_weight(k) >= 12 or parse_weight(k).denominator == 2:
        assert len(cusp_basis(k)) == d


def test_odd_weight_rejected():
    with pytest.raises(ValueError):
        cusp_dimension(13)


@pytest.mark.parametrize("text, val", [("25/2", Fraction(25, 2)), ("12", Fraction(12)), (" 7/2 ", Fraction(7, 2)), (6.5, Fraction(13, 2))])
def test_parse_weight(text, val):
    assert parse_weight(text) == val


@pytest.mark.parametrize("bad", ["1/3", "abc", 0.3, None])
def test_parse_weight_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_weight(bad)


def test_half_integral_family_leads():
    b = half_integral_cusp_family("25/2", 10)
    assert [f.lead_exp for f in b.members] == [Fraction(25, 24), Fraction(1, 24)]
    assert b.members[1].coeffs[:2] == (1, 719)  # eta^25 j: 744 - 25


def test_json_roundtrip():
    for f in [delta_series(30), half_integral_cusp_family("49/2", 20).members[2]]:
        g = QExpansion.from_json(f.to_json())
        assert (g.weight, g.lead_exp, g.coeffs) == (f.weight, f.lead_exp, f.coeffs)
    assert json.loads(eta_power_series(25, 5).to_json())["lead_exp"] == "25/24"


def test_delta_at_i_closed_form():
    exact = float(mpmath.gamma(0.25) ** 24 / (2**24 * mpmath.pi**18))
    for prec in (53, 64, 120):
        val, tail = evaluate_form(delta_series(60), 1j, precision=prec)
        assert val.real == pytest.approx(exact, rel=1e-14)
        assert abs(val.imag) < 1e-18
        assert tail < 1e-25


@given(st.floats(-0.5, 0.5), st.floats(0.6, 2.5))
def test_delta_modularity(x, y):
    z = complex(x, y)
    d = delta_series(200)
    lhs, _ = evaluate_form(d, -1 / z)
    rhs, _ = evaluate_form(d, z)
    assert abs(lhs - z**12 * rhs) <= 1e-10 * abs(z**12 * rhs)


@given(st.floats(-0.5, 0.5), st.floats(0.6, 2.5))
def test_e4_modularity(x, y):
    z = complex(x, y)
    e4 = eisenstein_series(4, 200)
    lhs, _ = evaluate_form(e4, -1 / z)
    rhs, _ = evaluate_form(e4, z)
    assert abs(lhs - z**4 * rhs) <= 1e-10 * abs(z**4 * rhs)


@given(st.integers(8, 40), st.floats(0.3, 3.0), st.floats(-0.5, 0.5))
def test_truncation_bound_is_sound(n, y, x):
    """The reported tail of an n-term expansion covers the change from doubling n."""
    z = complex(x, y)
    short, long_ = delta_series(n), delta_series(2 * n)
    v_short, tail = evaluate_form(short, z)
    v_long, _ = evaluate_form(long_, z)
    assert abs(v_short - v_long) <= tail + 1e-15 * abs(v_long)


def test_truncation_error_reports_needed_terms():
    f = delta_series(6)
    with pytest.raises(TruncationError) as info:
        evaluate_form(f, 0.1 + 0.05j, tol=1e-12)
    assert info.value.needed > 6
    g = delta_series(info.value.needed)
    _, tail = evaluate_form(g, 0.1 + 0.05j)
    assert tail <= 1e-12


def test_petersson_values_match_pointwise():
    f = delta_series(100)
    z = np.array([0.1 + 1j, -0.3 + 2.0j, 0.49 + 0.9j])
    vals = petersson_values([f], z)[0]
    for zz, v in zip(z, vals):
        direct, _ = evaluate_form(f, zz)
        assert v == pytest.approx(zz.imag**6 * direct, rel=1e-13)


def test_cusp_basis_grows_truncation_for_low_points():
    short = cusp_basis(36)
    low = cusp_basis(36, y_min=0.2)
    assert low.members[0].trunc > short.members[0].trunc
    for f in low.members:
        f.terms_needed(0.2)
