import math

import mpmath as mp
import pytest
from hypothesis import given
from scipy.integrate import solve_ivp

import oracles
from conftest import lambda_params
from loudcrit.errors import DomainError, PoleError
from loudcrit.loud_core import Params, conic_data, first_integral, in_lambda, vector_field


@pytest.mark.parametrize(
    "D,F,expected",
    [(-0.6, 1.3, True), (-0.5, 1.3, False), (-1.4, 1.3, False), (-0.7, 1.0, False), (-2.0, 2.1, True)],
)
def test_in_lambda(D, F, expected):
    assert in_lambda(Params(D, F)) is expected
    assert Params(D, F).in_lambda is expected


def test_conic_reference_values():
    cd = conic_data(Params(-0.6, 1.3))
    assert cd.a == pytest.approx(1.0, abs=1e-14)
    assert cd.b == pytest.approx(-1.875, abs=1e-14)
    assert cd.c == pytest.approx(0.7211538, abs=1e-7)
    assert cd.p1 == pytest.approx(0.540321, abs=5e-6)
    assert cd.p2 == pytest.approx(0.334679 + 1.0, abs=5e-6)
    assert cd.h0 == pytest.approx(0.7211538, abs=1e-7)


def test_conic_matches_high_precision_oracle():
    cd = conic_data(Params(-0.6, 1.3))
    a, b, c, p1, p2 = oracles.conic(-0.6, 1.3)
    for got, want in [(cd.a, a), (cd.b, b), (cd.c, c), (cd.p1, p1), (cd.p2, p2)]:
        assert abs(got - float(want)) < 1e-14 * max(1.0, abs(float(want)))
    assert cd.p1 * cd.p2 == pytest.approx(cd.c / cd.a, rel=1e-14)


@pytest.mark.parametrize("F", [0.0, 0.5, 1.0])
def test_poles_rejected(F):
    with pytest.raises(PoleError):
        conic_data(Params(-0.6, F))


@given(lambda_params())
def test_conic_invariants(mu):
    cd = conic_data(mu)
    for p in (cd.p1, cd.p2):
        assert abs(cd.q(p)) <= 1e-12 * max(abs(cd.a * p * p), abs(cd.b * p), abs(cd.c))
    assert 0.0 < cd.p1 < cd.p2
    assert cd.p1 < 1.0
    assert cd.h0 > 0.0
    assert cd.h0 == pytest.approx(cd.c, rel=1e-12)


def test_vector_field_examples():
    mu = Params(-0.6, 1.3)
    assert vector_field(mu, 0.0, 0.0) == (0.0, 0.0)
    assert vector_field(mu, 1.0, 0.7) == pytest.approx((0.0, 1.0 + mu.D + mu.F * 0.49))
    p1 = conic_data(mu).p1
    fx, fy = vector_field(mu, p1, 0.0)
    assert fx == 0.0
    assert fy == pytest.approx(p1 + mu.D * p1 * p1)
    assert fy == pytest.approx(0.36516, abs=1e-5)


def test_first_integral_examples():
    mu = Params(-0.6, 1.3)
    cd = conic_data(mu)
    assert first_integral(mu, 0.0, 0.0) == pytest.approx(-cd.c)
    assert first_integral(mu, cd.p1, 0.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        first_integral(mu, 1.0, 0.0)


@given(lambda_params(F_hi=2.3, margin=0.05))
def test_first_integral_conserved_along_flow(mu):
    cd = conic_data(mu)
    x0 = 0.5 * cd.p1
    sol = solve_ivp(lambda t, v: vector_field(mu, *v), (0, 8.0), [x0, 0.0], method="DOP853", rtol=1e-12, atol=1e-13)
    h = [first_integral(mu, x, y) for x, y in sol.y.T]
    drift = max(abs(v - h[0]) for v in h) / abs(h[0])
    assert drift < 1e-8


def test_h0_equals_potential_level_at_polycycle():
    # H along y = 0 at the conic root is 0 = H(center) + h0 in potential units
    a, b, c, p1, p2 = oracles.conic(-0.6, 1.3)
    assert float(oracles.potential(-0.6, 1.3, oracles.u_right(-0.6, 1.3))) == pytest.approx(float(c), rel=1e-20)
    assert float(mp.mpf(conic_data(Params(-0.6, 1.3)).h0)) == pytest.approx(float(c), rel=1e-15)


@pytest.mark.parametrize("F", [1.05, 1.1536, 1.6714, 2.3964])
def test_double_root_on_d_equals_minus_f(F):
    cd = conic_data(Params(-F, F))
    assert cd.p1 == pytest.approx(cd.p2, rel=4e-16)
    assert cd.q(cd.p1) == pytest.approx(0.0, abs=1e-14)
