import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cuspbergman.models import (
    P1_AREA,
    TORUS_LANDAU_GAP,
    HeatTruncationError,
    ModelSpec,
    bouche_rhs,
    curvature_alpha,
    levels_needed,
    p1_bergman,
    p1_heat_kernel,
    p1_spectrum,
    torus_bergman,
    torus_fd_spectrum,
    torus_heat_kernel,
    torus_spectrum,
    verify_bouche_limit,
)

# -- projective line -------------------------------------------------------------


def sym_box(section, m, z, zb):
    """dbar-Laplacian on the round sphere of area 4 pi, normalised to -(1/2) Lap when flat."""
    phi = m * sympy.log(1 + z * zb)
    area_density = 4 / (1 + z * zb) ** 2
    inner = sympy.exp(-phi) * sympy.diff(section, zb)
    return -2 / area_density * sympy.exp(phi) * sympy.diff(inner, z)


@pytest.mark.parametrize(
    "section, q",
    [
        (lambda z, zb: z**2, 0),
        (lambda z, zb: zb / (1 + z * zb), 1),
        (lambda z, zb: zb**2 / (1 + z * zb) ** 2, 2),
    ],
)
def test_p1_eigenvalues_symbolic(section, q):
    z, zb, m = sympy.symbols("z zb m", positive=True)
    s = section(z, zb)
    ratio = sympy.simplify(sym_box(s, m, z, zb) / s)
    expected = sympy.Rational(1, 2) * q * (m + q + 1)
    assert sympy.simplify(ratio - expected) == 0
    for mm in (3, 10):
        lam, _ = p1_spectrum(mm, 2).levels[q]
        assert lam == pytest.approx(float(expected.subs(m, mm)))


def test_p1_alpha():
    assert curvature_alpha("projective-line") == pytest.approx(0.5)
    assert curvature_alpha("torus") == pytest.approx(TORUS_LANDAU_GAP)


def test_p1_trivial_bundle():
    assert p1_bergman(0, 0.7 - 0.2j) == pytest.approx(1.0 / P1_AREA)


@pytest.mark.parametrize("m", [1, 5, 40, 200])
def test_p1_constancy_and_mass(m):
    rng = np.random.default_rng(m)
    z = rng.normal(scale=3, size=100) + 1j * rng.normal(scale=3, size=100)
    b = p1_bergman(m, np.append(z, 0j))
    assert np.ptp(b) / b.mean() < 1e-10
    assert b[0] * P1_AREA == pytest.approx(m + 1, rel=1e-12)


@pytest.mark.parametrize("m", [2, 10, 50, 100, 200])
def test_p1_scaling_to_chern_density(m):
    ratio = p1_bergman(m, 0.4 + 0.1j) / m
    assert abs(ratio - 1.0 / P1_AREA) * P1_AREA < 2.0 / m


def test_p1_spectrum_structure():
    spec = p1_spectrum(6, 5)
    assert spec.levels[0] == (0.0, 7)
    assert np.all(np.diff(spec.eigenvalues) > 0)
    assert list(spec.degeneracies) == [7 + 2 * q for q in range(6)]


# -- torus ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def fd3():
    return torus_fd_spectrum(3, 64, 12)


def test_torus_fd_ladder(fd3):
    levels = fd3.reshape(4, 3)
    # each cluster is m-fold degenerate
    assert np.all(np.ptp(levels, axis=1) < 1e-6 * np.abs(levels).max())
    means = levels.mean(axis=1)
    gap1, gap2 = means[1] - means[0], means[2] - means[0]
    assert gap2 / gap1 == pytest.approx(2.0, rel=1e-2)
    assert abs(means[0]) < 0.01 * gap1
    assert gap1 / 3 == pytest.approx(TORUS_LANDAU_GAP, rel=1e-2)


def test_torus_spectrum_levels():
    spec = torus_spectrum(5, 4)
    assert spec.levels[0] == (0.0, 5)
    assert set(spec.degeneracies) == {5}
    lam = spec.eigenvalues
    assert lam[2] / lam[1] == pytest.approx(2.0)


@pytest.mark.parametrize("m", [1, 8, 64])
def test_torus_heat_dominates_and_converges(m):
    ts = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0]
    vals = [torus_heat_kernel(m, t, levels_needed("torus", 0.1)).value for t in ts]
    assert all(v >= torus_bergman(m) for v in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert torus_heat_kernel(m, 20.0, 8).value == pytest.approx(torus_bergman(m), abs=1e-6)


def test_heat_tail_enforced():
    with pytest.raises(HeatTruncationError):
        torus_heat_kernel(4, 0.05, 2)
    with pytest.raises(HeatTruncationError):
        p1_heat_kernel(4, 0.05, 2)


@given(st.integers(1, 40), st.floats(0.05, 5.0))
def test_p1_heat_dominates_bergman(m, t):
    hv = p1_heat_kernel(m, t, levels_needed("projective-line", t))
    assert hv.value >= p1_bergman(m, 0.1j) * (1 - 1e-12)


# -- Bouche comparison ------------------------------------------------------------------


def test_bouche_rhs_values():
    assert bouche_rhs(1e-12, 1.0) == pytest.approx(1.0 / (4.0 * math.pi))
    assert bouche_rhs(0.0, 2.0) == pytest.approx(1.0 / (8.0 * math.pi))
    assert bouche_rhs(1.0, 1.0) == pytest.approx(1.0 / (4.0 * math.pi * math.sinh(1.0)))
    with pytest.raises(ValueError):
        bouche_rhs(1.0, 0.0)


@given(st.floats(0.01, 20), st.floats(0.01, 5))
def test_bouche_rhs_even(a, t):
    assert bouche_rhs(-a, t) == pytest.approx(bouche_rhs(a, t))


def test_torus_literal_offset_is_zero_point_shift():
    """(1/m) hk_m(t) = e^{alpha t} alpha / (4 pi sinh alpha t) for every m on the torus."""
    rows = verify_bouche_limit("torus", 1.0, [8, 16, 32, 64])
    a = curvature_alpha("torus")
    for r in rows:
        assert r.heat / r.m == pytest.approx(math.exp(a) * r.bouche_rhs, rel=1e-12)
        assert r.rel_err_shifted < 1e-12
        assert r.tail < 1e-12


def test_p1_shifted_error_decays_like_inverse_m():
    errs = [r.rel_err_shifted for r in verify_bouche_limit("projective-line", 1.0, [8, 16, 32, 64])]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.02
    for m, e in zip([8, 16, 32, 64], errs):
        assert e * m == pytest.approx(errs[0] * 8, rel=0.1)


def test_p1_uniformity_proxy():
    ts = np.linspace(0.5, 2.0, 5)
    worst = [max(verify_bouche_limit("projective-line", t, [m])[0].rel_err_shifted for t in ts) for m in (8, 16, 32, 64)]
    assert all(a > b for a, b in zip(worst, worst[1:]))


def test_large_time_regimes_separate():
    for kind in ("torus", "projective-line"):
        (r,) = verify_bouche_limit(kind, 40.0, [16])
        assert r.heat / r.m == pytest.approx(r.bergman / r.m, rel=1e-9)
        assert r.bouche_rhs < 1e-8


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec("sphere", 3)
    with pytest.raises(ValueError):
        ModelSpec("torus", -1)
    assert ModelSpec("torus", 2).area == 1.0
