import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import lambda_params
from loudcrit.delta import curve_g, delta
from loudcrit.engine import n1_of_mu
from loudcrit.errors import DomainError, FitError
from loudcrit.loud_core import Params
from loudcrit.potential import PotentialModel
from loudcrit.period import (
    count_critical_periods,
    endpoint_t_prime,
    fit_polycycle_asymptotics,
    limit_p_prime,
    loud_period,
    p_prime,
    period_derivative,
    period_energy,
    period_section,
    potential_period_ode,
    scan_critical_periods,
    zeta,
    zeta_prime,
)

T_HALF_FIXTURE = 5.7624926258805988  # mpmath oracle, mu = (-0.6, 1.3), h = h0/2


def test_harmonic_limit(model_ref):
    assert period_energy(model_ref, 1e-8).T == pytest.approx(2 * math.pi, abs=1e-4)


@given(lambda_params(F_hi=2.4, margin=0.05), st.floats(0.01, 0.99))
@settings(max_examples=15)
def test_period_sample_invariants(mu, frac):
    m = PotentialModel(mu)
    smp = period_energy(m, frac * m.h0)
    assert smp.T > 0 and smp.quad_error < 1e-8 * smp.T
    assert m.u_left <= smp.u_minus < 0 < smp.u_plus < m.u_right
    assert 0 < smp.left_gap == pytest.approx(smp.u_minus - m.u_left, abs=4 * np.spacing(abs(m.u_left)))
    for sign, u in ((-1, smp.u_minus), (1, smp.u_plus)):
        pt = m.solve_level(sign * math.sqrt(smp.h))
        assert m.potential(pt) == pytest.approx(smp.h, abs=1e-12 * max(1.0, m.h0))
        # storing u rounds it; near u_left |V'| is large and amplifies that ulp
        slack = 4 * abs(m.derivs(pt).V1) * np.spacing(abs(u))
        assert m.potential(m.point_from_u(u)) == pytest.approx(smp.h, abs=1e-12 * max(1.0, m.h0) + slack)


def test_period_fixture(model_ref):
    h = model_ref.h0 / 2
    assert period_energy(model_ref, h).T == pytest.approx(T_HALF_FIXTURE, rel=1e-12)
    assert period_energy(model_ref, h).T == pytest.approx(float(oracles.period(-0.6, 1.3, h)), rel=1e-11)


@pytest.mark.parametrize("D,F,frac", [(-0.6, 1.3, 0.5), (-1.2, 1.45, 0.9), (-0.8, 1.9, 0.3)])
def test_period_matches_potential_ode(D, F, frac):
    m = PotentialModel(Params(D, F))
    h = frac * m.h0
    assert period_energy(m, h).T == pytest.approx(potential_period_ode(m, h), rel=1e-6)


def test_energy_domain(model_ref):
    with pytest.raises(DomainError):
        period_energy(model_ref, model_ref.h0)
    with pytest.raises(DomainError):
        period_energy(model_ref, -1e-3)
    with pytest.raises(DomainError):
        period_energy(model_ref, model_ref.h0 * (1 - 1e-16))


def test_zeta_section(model_ref):
    m = model_ref
    s = np.geomspace(1e-6, 0.3, 12)
    vals = [zeta(m, float(x))[0] for x in s]
    assert np.all(np.diff(vals) < 0)
    assert zeta(m, 1e-12)[0] == pytest.approx(m.h0, rel=1e-9)
    for x in (1e-4, 0.1):
        num = (zeta(m, x * 1.001)[0] - zeta(m, x * 0.999)[0]) / (0.002 * x)
        assert zeta_prime(m, x) == pytest.approx(num, rel=1e-5)
    with pytest.raises(DomainError):
        zeta(m, m.conic.p1)


@pytest.mark.parametrize("D,F", [(-0.6, 1.3), (-1.2, 1.4), (-0.9, 1.7)])
@pytest.mark.parametrize("s", [0.05, 0.1, 0.2])
def test_loud_conjugacy(D, F, s):
    m = PotentialModel(Params(D, F))
    assert period_section(m, s) == pytest.approx(loud_period(m.mu, s), rel=1e-6)


def test_derivative_methods_agree(model_ref):
    m = model_ref
    for frac in (0.3, 0.9, 0.999):
        h = frac * m.h0
        a = period_derivative(m, h)
        b = period_derivative(m, h, method="integral")
        assert a == pytest.approx(b, rel=1e-5)
    with pytest.raises(ValueError):
        period_derivative(m, 0.5 * m.h0, method="spline")


def test_p_prime_routes_agree(model_ref):
    for s in (1e-2, 1e-3):
        assert p_prime(model_ref, s) == pytest.approx(p_prime(model_ref, s, "integral"), rel=1e-5)


@pytest.mark.parametrize("D,F", [(-0.6, 1.3), (-1.0, 1.2), (-1.3, 1.45), (-0.9, 1.15), (-0.7, 1.4)])
def test_limit_p_prime_matches_delta(D, F):
    m = PotentialModel(Params(D, F))
    d = delta(m.mu)
    assert limit_p_prime(m) == pytest.approx(d, rel=1e-2)


def test_limit_p_prime_sign_flips_across_curve():
    G = curve_g(1.4).G
    lo = limit_p_prime(PotentialModel(Params(G - 0.05, 1.4)))
    hi = limit_p_prime(PotentialModel(Params(G + 0.05, 1.4)))
    assert lo * hi < 0


def test_limit_p_prime_small_on_curve():
    for F in (1.38, 1.45):
        G = curve_g(F).G
        scale = abs(limit_p_prime(PotentialModel(Params(G + 0.05, F))))
        assert abs(limit_p_prime(PotentialModel(Params(G, F)))) < 1e-3 * scale


def test_limit_p_prime_domain():
    with pytest.raises(DomainError):
        limit_p_prime(PotentialModel(Params(-1.0, 1.5)))
    with pytest.raises(DomainError):
        limit_p_prime(PotentialModel(Params(-1.0, 1.7)))


@pytest.mark.parametrize("D,F", [(-0.6, 1.3), (-1.2, 1.4)])
def test_endpoint_t_prime_from_n1(D, F):
    m = PotentialModel(Params(D, F))
    n1 = n1_of_mu(m).value
    # T'(h0) zeta'(0) is the bifurcation coefficient
    assert endpoint_t_prime(m, n1) * zeta_prime(m, 0.0) == pytest.approx(delta(m.mu), rel=1e-7)


def test_fit_large_f_blows_up():
    F = 1.7
    m = PotentialModel(Params(-1.0, F))
    fit = fit_polycycle_asymptotics(m)
    xi = (3 * F - 4) / (2 * (F - 1))
    assert fit.gamma_fit == pytest.approx(0.5 - xi, rel=0.05)
    assert fit.gamma_fit < 0
    assert fit.h_window[0] < fit.h_window[1] < m.h0


def test_fit_flips_sign_across_f_two():
    lo = fit_polycycle_asymptotics(PotentialModel(Params(-1.0, 1.7))).delta_star_fit
    hi = fit_polycycle_asymptotics(PotentialModel(Params(-1.0, 2.3))).delta_star_fit
    assert lo * hi < 0


@pytest.mark.xfail(strict=True, reason="T' < 0 near h0 at (-1, 1.7) while sign((F-2)/D) > 0; see decision ledger")
def test_fit_sign_matches_f_minus_two_over_d():
    m = PotentialModel(Params(-1.0, 1.7))
    assert np.sign(fit_polycycle_asymptotics(m).delta_star_fit) == np.sign((1.7 - 2) / -1.0)


def test_fit_small_f_is_bounded():
    m = PotentialModel(Params(-0.7, 1.2))
    fit = fit_polycycle_asymptotics(m)
    assert abs(fit.gamma_fit) < 1e-3
    n1 = n1_of_mu(m).value
    assert fit.delta_star_fit == pytest.approx(n1 / (math.sqrt(2) * m.h0), rel=1e-3)


def test_fit_ladder_below_resolution(model_ref):
    with pytest.raises(FitError):
        fit_polycycle_asymptotics(model_ref, gaps=(1e-13, 1e-16))


def test_count_regular_parameter():
    m = PotentialModel(Params(-0.7, 1.2))
    assert count_critical_periods(m, 0.05 * m.h0, m.h0 * (1 - 1e-10), 30) == 0


def test_count_witness_near_curve():
    G = curve_g(1.4).G
    counts = []
    for D in (G - 0.02, G + 0.02):
        m = PotentialModel(Params(D, 1.4))
        scan = scan_critical_periods(m, 0.95 * m.h0, m.h0 * (1 - 1e-12), 40)
        counts.append(scan.count)
        for loc in scan.locations:
            assert 0.95 * m.h0 < loc < m.h0
            assert abs(period_derivative(m, loc, method="integral")) < 1e-6
    assert sorted(counts) == [0, 1]


def test_count_degenerate_inputs(model_ref):
    m = model_ref
    assert count_critical_periods(m, 0.1 * m.h0, 0.9 * m.h0, 1) == 0
    with pytest.raises(DomainError):
        count_critical_periods(m, 0.9 * m.h0, 0.1 * m.h0, 10)
    lin = scan_critical_periods(m, 0.1 * m.h0, 0.9 * m.h0, 10, spacing="linear", method="difference")
    assert lin.count == 0
