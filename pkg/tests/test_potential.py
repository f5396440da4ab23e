import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import lambda_grid, lambda_params, rel
from loudcrit.chebyshev import wronskian
from loudcrit.errors import DomainError, SingularityError
from loudcrit.loud_core import Params, conic_data
from loudcrit.potential import (
    PotentialModel,
    f_even,
    g_eval,
    g_inv,
    g_inv_d2,
    l_at_boundary,
    l_eval,
    phi,
    phi_inv,
    psi_big,
    r_eval,
    v_derivatives,
)


def test_phi_basics():
    for F in (1.1, 1.3, 2.0):
        assert phi(1.0, F) == 0.0
        assert phi_inv(0.0, F) == 1.0
    with pytest.raises(DomainError):
        phi(0.0, 1.3)
    with pytest.raises(DomainError):
        phi_inv(-1.0 / 1.3 - 1e-9, 1.3)


def test_u_right_reference(model_ref):
    p1 = conic_data(model_ref.mu).p1
    assert phi(1.0 - p1, 1.3) == pytest.approx(1.3436, abs=1e-4)
    assert model_ref.u_right == pytest.approx(float(oracles.u_right(-0.6, 1.3)), rel=1e-14)


@given(st.floats(1.05, 2.5), st.floats(0.05, 20.0))
def test_phi_roundtrip(F, z):
    assert phi_inv(phi(z, F), F) == pytest.approx(z, rel=1e-12)


def test_center_values_on_grid():
    worst = 0.0
    for mu in lambda_grid(30):
        V, V1, V2, _, _ = v_derivatives(PotentialModel(mu), 0.0)
        assert V == 0.0 and V1 == 0.0
        worst = max(worst, abs(V2 - 1.0))
    assert worst < 1e-12


def test_right_end_values(model_ref):
    mu = model_ref.mu
    p1 = conic_data(mu).p1
    V, V1, *_ = v_derivatives(model_ref, model_ref.u_right)
    assert V == pytest.approx(model_ref.h0, rel=1e-14)
    assert V1 == pytest.approx((1 - p1) ** (-mu.F) * p1 * (mu.D * p1 + 1), rel=1e-12)
    assert V1 != 0.0


def test_potential_matches_oracle(model_ref):
    for u in (-0.76, -0.5, -0.1, 0.05, 0.4, 1.0, 1.3):
        got = v_derivatives(model_ref, u)[0]
        want = float(oracles.potential(-0.6, 1.3, u))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-16)


@given(lambda_params(), st.floats(0.02, 0.98))
def test_v_prime_finite_difference(mu, t):
    m = PotentialModel(mu)
    u = m.u_left + t * (m.u_right - m.u_left)
    eps = 1e-6
    if abs(u) < 10 * eps or u + eps > m.u_right:
        return
    fd = (v_derivatives(m, u + eps)[0] - v_derivatives(m, u - eps)[0]) / (2 * eps)
    assert fd == pytest.approx(v_derivatives(m, u)[1], rel=1e-6, abs=1e-9)


@given(lambda_params(), st.floats(0.01, 0.99))
def test_monotone_well(mu, t):
    m = PotentialModel(mu)
    uL = m.u_left * t
    uR = m.u_right * t
    VL, V1L, *_ = v_derivatives(m, uL)
    VR, V1R, *_ = v_derivatives(m, uR)
    assert V1L < 0 < V1R
    assert 0 < VL < m.h0 and 0 < VR < m.h0
    assert m.depth(m.point_from_u(uR)) > 0


def test_depth_vanishes_at_ends(model_ref):
    m = model_ref
    assert m.depth(m.point_from_right_gap(0.0)) == 0.0
    assert m.depth(m.point_from_left_gap(1e-12)) < 1e-5


def test_g_center_and_inverse(model_ref):
    m = model_ref
    assert g_eval(m, 1e-300) == pytest.approx(0.0, abs=1e-150)
    assert g_inv(m, 0.0) == 0.0
    ys = np.random.default_rng(3).uniform(-1, 1, 100) * math.sqrt(m.h0) * 0.999
    for y in ys:
        assert g_eval(m, g_inv(m, y)) == pytest.approx(y, abs=1e-10)
    assert m.g_derivs(m.point_from_u(0.0))[1] == pytest.approx(1 / math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("y", [-0.7, -0.3, 0.2, 0.6])
def test_g_inv_d2_finite_difference(model_ref, y):
    m = model_ref
    h = 1e-4
    fd = (g_inv(m, y + h) - 2 * g_inv(m, y) + g_inv(m, y - h)) / (h * h)
    assert rel(g_inv_d2(m, y), fd) < 1e-5


def test_f_even_parity_and_zero(model_ref):
    assert f_even(model_ref, 0.0) == 0.0
    for x in (0.1, 0.5, 0.9):
        assert f_even(model_ref, x) == f_even(model_ref, -x)


def test_r_eval(model_ref):
    m = model_ref
    r = r_eval(m, m.u_right)
    assert math.isfinite(r) and r > 0
    assert r == pytest.approx(0.08735793598907297, rel=1e-12)
    with pytest.raises(SingularityError):
        r_eval(m, 0.0)


@given(lambda_params(), st.floats(0.05, 0.95))
def test_r_defining_identity(mu, t):
    m = PotentialModel(mu)
    u = m.u_left + t * (m.u_right - m.u_left)
    if abs(u) < 1e-3:
        return
    V, V1, V2, _, _ = v_derivatives(m, u)
    r = r_eval(m, u)
    scale = max(V1 * V1, abs(2 * V * V2))
    assert abs(r * V1**3 + 2 * V * V2 - V1 * V1) <= 1e-10 * scale


def test_l_anchor_values():
    for F in (1.1, 1.3, 1.7, 2.4):
        mu = Params(-F, F)
        assert l_eval(mu, 1.0 - conic_data(mu).p1) == pytest.approx(1 / F**2, rel=1e-10)
        mu = Params(-0.5, F)
        want = (F**F * (F - 1) ** (1 - F) + 2 - 3 * F) / (4 * F * F * (F - 1))
        assert l_eval(mu, 1.0 - conic_data(mu).p1) == pytest.approx(want, rel=1e-10)
    mu = Params(-0.6, 1.3)
    assert l_eval(mu, 1.0 - conic_data(mu).p1) > 0


def _window_grid(F_hi=2.5, n=100):
    F, t = np.meshgrid(np.linspace(1.001, F_hi, n), np.linspace(0.001, 0.999, n))
    D = -F + t * (F - 0.5)
    keep = D >= -2.5
    return D[keep], F[keep]


def test_l_positive_for_f_up_to_two():
    D, F = _window_grid(F_hi=2.0)
    assert np.all(l_at_boundary(D, F) > 0)


def test_l_vectorised_matches_scalar():
    D, F = _window_grid()
    for i in (5, 407, 9000):
        mu = Params(float(D[i]), float(F[i]))
        assert l_at_boundary(mu.D, mu.F) == pytest.approx(l_eval(mu, 1.0 - conic_data(mu).p1), rel=1e-12)


def test_l_negative_pocket_is_real():
    # V'^2 - 2 h0 V'' at u_right from high-precision numerical derivatives
    import mpmath as mp

    D, F = -0.6, 2.5
    with mp.workdps(40):
        ur = oracles.u_right(D, F)
        V = lambda u: oracles.potential(D, F, u)
        h0 = V(ur)
        val = float(mp.diff(V, ur) ** 2 - 2 * h0 * mp.diff(V, ur, 2))
    assert val < 0
    assert l_at_boundary(D, F) == pytest.approx(val, rel=1e-9)


@pytest.mark.xfail(strict=True, reason="L(1-p1) < 0 for F > 2 near D = -1/2; see decision ledger")
def test_l_positive_on_full_window_grid():
    D, F = _window_grid()
    assert np.all(l_at_boundary(D, F) > 0)


def _psi_wronskian(m, u, nu):
    def a(v):
        V = v_derivatives(m, v)[0]
        return (V / (m.h0 - V)) ** (nu / 2)

    def b(v):
        V = v_derivatives(m, v)[0]
        return (m.h0 - V) * math.sqrt(V) * r_eval(m, v)

    dom = (0.0, m.u_right) if u > 0 else (m.u_left, 0.0)
    return wronskian([a, b], u, domain=dom) / v_derivatives(m, u)[1]


@given(lambda_params(F_hi=2.4, margin=0.05), st.floats(0.1, 0.9), st.floats(-2.5, 2.5), st.booleans())
def test_psi_big_matches_wronskian(mu, t, nu, right):
    m = PotentialModel(mu)
    u = t * (m.u_right if right else m.u_left)
    closed = psi_big(m, u, nu)
    assert rel(closed, _psi_wronskian(m, u, nu)) < 1e-5


def test_psi_big_right_end_behaviour(model_ref):
    m = model_ref
    # nu = -1: Psi ~ b (u_r - u)^(1/2); nu = -2 kills the leading term
    d1, d2 = 1e-8, 1e-10
    p1 = psi_big(m, m.u_right - d1, -1.0)
    p2 = psi_big(m, m.u_right - d2, -1.0)
    assert math.log(p1 / p2) / math.log(d1 / d2) == pytest.approx(0.5, abs=1e-3)
    q1 = psi_big(m, m.u_right - d1, -2.0)
    assert abs(q1) < 1e-6 * abs(psi_big(m, m.u_right - d1, 0.0))
