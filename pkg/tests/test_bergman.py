import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuspbergman.bergman import (
    DEFAULT_PROBES,
    _truncated_domain,
    bergman_at,
    bergman_sup,
    bergman_values,
    hyperbolic_bump,
    mass,
    que_average,
    scaling_row,
)
from cuspbergman.forms import delta_series, evaluate_form
from cuspbergman.geom import S, T, moebius_apply

from conftest import random_points_in_F
from test_pet import DELTA_NORM_SQ

# brute-force 1000 x 1000 scan of B_12 over F with y <= 4 (x and height fraction uniform)
B12_SUP_DENSE = 3.969055144587724


def b12_closed(z):
    val, _ = evaluate_form(delta_series(120), z)
    return z.imag**12 * abs(val) ** 2 / DELTA_NORM_SQ


def test_empty_space_is_zero(ortho):
    o = ortho(10)
    assert o.dim == 0
    assert bergman_at(o, 0.2 + 1.3j).value == 0.0
    assert bergman_sup(o)[0] == 0.0


@pytest.mark.parametrize("z", [1j, 0.5 + 0.9j, -0.2 + 1.7j, 0.3 + 3.0j])
def test_k12_closed_form(ortho, z):
    assert bergman_at(ortho(12), z).value == pytest.approx(b12_closed(z), rel=1e-8)


def test_k12_scaling_ratio_closed_form(ortho):
    row = scaling_row(ortho(12), DEFAULT_PROBES, coarse=16, refine_steps=2)
    for z, b, r in row.points:
        assert r == pytest.approx(b12_closed(z) / 12.0, rel=1e-8)


@pytest.mark.parametrize("k", [12, 24, 36, "25/2", "49/2"])
def test_gamma_invariance_unreduced(ortho, k):
    o = ortho(k, y_min=0.1)
    z = random_points_in_F(20, seed=11)
    ref = bergman_values(o, z, reduce=False)
    for g in (S, T, T @ S):
        np.testing.assert_allclose(bergman_values(o, moebius_apply(g, z), reduce=False), ref, rtol=1e-9)


def test_reduced_evaluation_agrees(ortho):
    o = ortho(24)
    z = 3.7 + 0.05j
    s = bergman_at(o, z)
    assert s.z.imag >= np.sqrt(3) / 2 - 1e-12
    assert s.value == pytest.approx(bergman_at(o, s.z, reduce=False).value, rel=1e-14)


def test_sup_matches_dense_grid(ortho):
    val, arg = bergman_sup(ortho(12))
    assert val == pytest.approx(B12_SUP_DENSE, rel=1e-3)
    assert abs(abs(arg.real) - 0.5) < 1e-3 and abs(arg.imag - np.sqrt(3) / 2) < 1e-3


@pytest.mark.parametrize("k", [24, "49/2"])
def test_sup_bounds_samples_and_grows_with_domain(ortho, k):
    o = ortho(k)
    v4, _ = bergman_sup(o, 4.0, coarse=32, refine_steps=4)
    v2, _ = bergman_sup(o, 2.0, coarse=32, refine_steps=4)
    assert v4 >= v2 - 1e-12
    zs = _truncated_domain(*np.meshgrid(np.linspace(-0.5, 0.5, 9), np.linspace(0, 1, 9)), 4.0).ravel()
    assert v4 >= bergman_values(o, zs, reduce=False).max()


def test_sup_rejects_low_cut(ortho):
    with pytest.raises(ValueError):
        bergman_sup(ortho(12), y_cut=0.5)


@pytest.mark.parametrize("k", [12, 36, 72, "25/2", "73/2"])
def test_mass_identity(ortho, k):
    o = ortho(k)
    assert mass(o) == pytest.approx(o.dim, rel=1e-6)


@given(st.floats(-20, 20), st.floats(0.02, 30))
def test_nonnegative(x, y):
    from conftest import ortho_for

    assert bergman_at(ortho_for(24), complex(x, y)).value >= 0.0


def test_que_constant(ortho):
    lhs, rhs, dev = que_average(lambda z: np.ones(z.shape), ortho(24))
    assert lhs == pytest.approx(1.0, abs=1e-12)
    assert dev < 1e-9


def test_que_bump_improves(ortho):
    bump = hyperbolic_bump(0.1 + 1.5j, 0.25)
    d12 = que_average(bump, ortho(12))[2]
    d120 = que_average(bump, ortho(120))[2]
    assert d120 < d12


def test_bump_is_localised():
    f = hyperbolic_bump(0.1 + 1.5j, 0.25)
    assert f(np.array([0.1 + 1.5j]))[0] == pytest.approx(1.0)
    assert f(np.array([0.1 + 6.0j]))[0] < 1e-12  # distance log 4
