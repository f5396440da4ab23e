"""Potential normal form of the Loud center.

The change of coordinates (u, v) = (phi(1 - x), (1 - x)^(-F) y) with
phi(z) = (z^(-F) - 1)/F turns X_mu into u' = -v, v' = V'(u).  Every closed
form here is evaluated in the variable z = phi^(-1)(u) = (Fu + 1)^(-1/F),
which maps the period annulus (u_left, u_right) = (-1/F, phi(1 - p1)) onto
(1 - p1, +inf) reversed.

Points are carried as :class:`ZPoint`, which stores ``log z``, ``z - 1`` and
``z - (1 - p1)`` separately so that the three delicate regimes (left end at
z = inf, center at z = 1, right end at z = 1 - p1) are all resolved to full
relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, SingularityError
from .loud_core import Params, conic_data, in_lambda

# Gauss-Legendre rule on [0, 1] for the center representation V = w^2 Q(w)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)
_TAU = 0.5 * (_GL_X + 1.0)
_OMEGA = 0.5 * _GL_W
# |z - 1| below this uses the quadrature representation of V
CENTER_ZONE = 0.5


def phi(z: float, F: float) -> float:
    if z <= 0.0:
        raise DomainError("phi needs z > 0")
    return math.expm1(-F * math.log(z)) / F


def phi_inv(u: float, F: float) -> float:
    t = F * u + 1.0
    if t <= 0.0:
        raise DomainError("phi_inv needs F u + 1 > 0")
    return math.exp(-math.log1p(F * u) / F)


@dataclass(frozen=True)
class ZPoint:
    """A point z = phi^(-1)(u) with its three accurate offsets."""

    s: float  # log z
    w: float  # z - 1
    delta: float  # z - (1 - p1)

    @property
    def z(self) -> float:
        return math.exp(self.s)


@dataclass(frozen=True)
class Derivs:
    V: float
    W: float  # h0 - V, computed without cancellation
    V1: float
    V2: float
    V3: float
    V4: float


@dataclass(frozen=True)
class PotentialModel:
    mu: Params
    h0: float = field(init=False)
    u_left: float = field(init=False)
    u_right: float = field(init=False)

    def __post_init__(self):
        if not in_lambda(self.mu):
            raise DomainError(f"{self.mu} is not in Lambda")
        cd = conic_data(self.mu)
        object.__setattr__(self, "h0", cd.h0)
        object.__setattr__(self, "u_left", -1.0 / self.mu.F)
        object.__setattr__(self, "u_right", phi(1.0 - cd.p1, self.mu.F))

    @classmethod
    def from_params(cls, D: float, F: float) -> "PotentialModel":
        return cls(Params(D, F))

    @cached_property
    def conic(self):
        return conic_data(self.mu)

    @property
    def z1(self) -> float:
        return 1.0 - self.conic.p1

    @property
    def z2(self) -> float:
        return 1.0 - self.conic.p2

    # ------------------------------------------------------------------ points
    def point_from_u(self, u: float) -> ZPoint:
        if not (self.u_left < u <= self.u_right):
            raise DomainError(f"u={u} outside ({self.u_left}, {self.u_right}]")
        F = self.mu.F
        s = -math.log1p(F * u) / F
        gap = self.u_right - u
        if u > 0.0 and gap < 0.5 * self.u_right:
            return self.point_from_right_gap(gap)
        return self._point_from_s(s)

    def point_from_z(self, z: float) -> ZPoint:
        if not z >= self.z1:
            raise DomainError(f"z={z} below 1 - p1")
        return ZPoint(math.log(z), z - 1.0, z - self.z1)

    def point_from_left_gap(self, d: float) -> ZPoint:
        """Point at distance d = u - u_left > 0 from the left endpoint."""
        F = self.mu.F
        return self._point_from_s(-math.log(F * d) / F)

    def point_from_right_gap(self, d: float) -> ZPoint:
        """Point at distance d = u_right - u >= 0 from the right endpoint."""
        F = self.mu.F
        tr = self.z1 ** (-F)  # F u_right + 1
        z1 = self.z1
        delta = z1 * math.expm1(-math.log1p(-F * d / tr) / F)
        return self._point_from_delta(delta)

    def _point_from_s(self, s: float) -> ZPoint:
        w = math.expm1(s)
        return ZPoint(s, w, (w + 1.0) - self.z1 if s < 700 else math.inf)

    def _point_from_delta(self, delta: float) -> ZPoint:
        z = self.z1 + delta
        w = delta - self.conic.p1
        return ZPoint(math.log(z), w, delta)

    def _point_from_w(self, w: float) -> ZPoint:
        return ZPoint(math.log1p(w), w, w + self.conic.p1)

    def u_of(self, pt: ZPoint) -> float:
        return math.expm1(-self.mu.F * pt.s) / self.mu.F

    # ------------------------------------------------------- closed-form pieces
    def _q_center(self, w: float) -> tuple[float, float, float]:
        """Q, Q', Q'' where V = w^2 Q(w) near the center."""
        D, F = self.mu.D, self.mu.F
        m = 2.0 * F + 1.0
        tau = _TAU
        base = 1.0 + w * tau
        lin = 1.0 - D * w * tau
        bm = base ** (-m)
        q0 = np.dot(_OMEGA, tau * bm * lin)
        q1 = np.dot(_OMEGA, tau**2 * (-m * bm / base * lin - D * bm))
        q2 = np.dot(_OMEGA, tau**3 * (m * (m + 1.0) * bm / base**2 * lin + 2.0 * m * D * bm / base))
        return float(q0), float(q1), float(q2)

    def depth(self, pt: ZPoint) -> float:
        """h0 - V at the point, accurate near both ends of the well."""
        a = self.conic.a
        if pt.s > 0.0:
            r = math.exp(-pt.s)
            return a * math.exp((2.0 - 2.0 * self.mu.F) * pt.s) * (1.0 - self.z1 * r) * (1.0 - self.z2 * r)
        z = pt.z
        return a * z ** (-2.0 * self.mu.F) * pt.delta * (z - self.z2)

    def potential(self, pt: ZPoint) -> float:
        if abs(pt.w) <= CENTER_ZONE:
            return pt.w * pt.w * self._q_center(pt.w)[0]
        return self.h0 - self.depth(pt)

    def derivs(self, pt: ZPoint) -> Derivs:
        """V and its first four u-derivatives (exact closed forms)."""
        D, F = self.mu.D, self.mu.F
        z = pt.z
        w = pt.w
        V1p = w * (D * w - 1.0)
        V2p = D * (F - 2.0) * z * z - (2.0 * D + 1.0) * (F - 1.0) * z + F * (D + 1.0)
        V3p = -2.0 * D * (F - 2.0) * z * z + (2.0 * D + 1.0) * (F - 1.0) * z
        V4p = 2.0 * D * (F * F - 4.0) * z * z - (2.0 * D + 1.0) * (F * F - 1.0) * z
        W = self.depth(pt)
        V = self.potential(pt)
        return Derivs(V, W, z ** (-F) * V1p, V2p, z**F * V3p, z ** (2.0 * F) * V4p)

    # ------------------------------------------------------------ g and R
    def g_derivs(self, pt: ZPoint) -> tuple[float, float, float]:
        """g, g', g'' (u-derivatives) where g = sgn(u) sqrt(V)."""
        F = self.mu.F
        w = pt.w
        if abs(w) <= CENTER_ZONE:
            Q, Q1, Q2 = self._q_center(w)
            rq = math.sqrt(Q)
            G = -w * rq
            Gw = -rq - w * Q1 / (2.0 * rq)
            Gww = -Q1 / rq - w * (Q2 / (2.0 * rq) - Q1 * Q1 / (4.0 * Q * rq))
            zz = 1.0 + w
            uw = -zz ** (-F - 1.0)
            uww = (F + 1.0) * zz ** (-F - 2.0)
            return G, Gw / uw, (Gww * uw - Gw * uww) / uw**3
        d = self.derivs(pt)
        g = math.copysign(math.sqrt(d.V), -w)
        g1 = d.V1 / (2.0 * g)
        g2 = (2.0 * d.V * d.V2 - d.V1 * d.V1) / (4.0 * g**3)
        return g, g1, g2

    def r_at(self, pt: ZPoint) -> float:
        """R = (V'^2 - 2 V V'') / V'^3, continuous through the center."""
        w = pt.w
        if abs(w) <= CENTER_ZONE:
            _, g1, g2 = self.g_derivs(pt)
            return -g2 / (2.0 * g1**3)
        D, F = self.mu.D, self.mu.F
        if pt.s > 0.0:
            # scaled by powers of z to stay finite as z -> inf
            r = math.exp(-pt.s)
            b1 = (1.0 - r) * (D * (1.0 - r) - r)
            b2 = D * (F - 2.0) - (2.0 * D + 1.0) * (F - 1.0) * r + F * (D + 1.0) * r * r
            V = self.potential(pt)
            inv_v1 = math.exp(-(2.0 - F) * pt.s) / b1
            ratio = math.exp((2.0 * F - 2.0) * pt.s) * b2 / (b1 * b1)
            return inv_v1 * (1.0 - 2.0 * V * ratio)
        d = self.derivs(pt)
        return (d.V1 * d.V1 - 2.0 * d.V * d.V2) / d.V1**3

    def ginv_d1(self, pt: ZPoint) -> float:
        """(g^-1)'(y) = 1/g'(u) at the point u = g^-1(y)."""
        w = pt.w
        if abs(w) <= CENTER_ZONE:
            return 1.0 / self.g_derivs(pt)[1]
        D, F = self.mu.D, self.mu.F
        g = math.copysign(math.sqrt(self.potential(pt)), -w)
        if pt.s > 0.0:
            r = math.exp(-pt.s)
            b1 = (1.0 - r) * (D * (1.0 - r) - r)
            return 2.0 * g * math.exp(-(2.0 - F) * pt.s) / b1
        return 2.0 * g / self.derivs(pt).V1

    # ------------------------------------------------------------ inversion
    def solve_level(self, y: float, gap: float | None = None) -> ZPoint:
        """Point with g(u) = y.  ``gap`` = h0 - y^2 if known more accurately."""
        h0 = self.h0
        if gap is None:
            gap = h0 - y * y
        if not (gap > 0.0):
            raise DomainError(f"level y={y} not inside (-sqrt(h0), sqrt(h0))")
        if y == 0.0:
            return ZPoint(0.0, 0.0, self.conic.p1)
        target = y * y
        right = y > 0.0
        kw = dict(xtol=1e-300, rtol=1e-15, maxiter=400, full_output=True)
        try:
            if target <= 0.5 * h0:
                # near the center: match V itself
                if right:
                    lo, hi = -self.conic.p1, 0.0
                else:
                    lo, hi = 0.0, 1.0
                    while self.potential(self._point_from_w(hi)) < target:
                        hi *= 2.0
                        if hi > 1e300:
                            raise ConvergenceError("left bracket failed")
                root, info = brentq(lambda w: self.potential(self._point_from_w(w)) - target, lo, hi, **kw)
                pt = self._point_from_w(root)
            elif right:
                root, info = brentq(lambda dl: self.depth(self._point_from_delta(dl)) - gap, 0.0, self.conic.p1, **kw)
                pt = self._point_from_delta(root)
            else:
                hi = 1.0
                while self.depth(self._point_from_s(hi)) > gap:
                    hi *= 2.0
                    if hi > 1e6:
                        raise ConvergenceError("left bracket failed")
                root, info = brentq(lambda s: self.depth(self._point_from_s(s)) - gap, 0.0, hi, **kw)
                pt = self._point_from_s(root)
        except ValueError as exc:
            raise ConvergenceError(str(exc)) from exc
        if not info.converged:
            raise ConvergenceError(f"level solve for y={y} did not converge")
        return pt


# ------------------------------------------------------------------ u-level API
def v_derivatives(model: PotentialModel, u: float) -> tuple[float, float, float, float, float]:
    d = model.derivs(model.point_from_u(u))
    return d.V, d.V1, d.V2, d.V3, d.V4


def g_eval(model: PotentialModel, u: float) -> float:
    return model.g_derivs(model.point_from_u(u))[0]


def g_inv(model: PotentialModel, y: float) -> float:
    return model.u_of(model.solve_level(y))


def g_inv_d2(model: PotentialModel, y: float, gap: float | None = None) -> float:
    """Second derivative of g^-1 at y; equals 2 R(g^-1(y))."""
    return 2.0 * model.r_at(model.solve_level(y, gap))


def f_even(model: PotentialModel, x: float, one_minus_x2: float | None = None) -> float:
    """Twice the even part of x -> x sqrt(h0) (g^-1)''(x sqrt(h0))."""
    if one_minus_x2 is None:
        one_minus_x2 = (1.0 - x) * (1.0 + x)
    # x may round to +-1 when the gap is supplied separately
    if not (abs(x) <= 1.0 and one_minus_x2 > 0.0):
        raise DomainError("f_even is defined on (-1, 1)")
    if x == 0.0:
        return 0.0
    h0 = model.h0
    y = abs(x) * math.sqrt(h0)
    gap = h0 * one_minus_x2
    rp = model.r_at(model.solve_level(y, gap))
    rm = model.r_at(model.solve_level(-y, gap))
    return 2.0 * abs(x) * math.sqrt(h0) * (rp - rm)


def r_eval(model: PotentialModel, u: float) -> float:
    if u == 0.0:
        raise SingularityError("R has a removable 0/0 at u = 0; use r_at for the limit")
    d = model.derivs(model.point_from_u(u))
    return (d.V1 * d.V1 - 2.0 * d.V * d.V2) / d.V1**3


def _v_polys(mu: Params, z: float) -> tuple[float, float, float]:
    D, F = mu.D, mu.F
    V0 = D / (2.0 - 2.0 * F) * z * z + (1.0 + 2.0 * D) / (2.0 * F - 1.0) * z - (D + 1.0) / (2.0 * F)
    V1 = (z - 1.0) * (D * (z - 1.0) - 1.0)
    V2 = D * (F - 2.0) * z * z - (2.0 * D + 1.0) * (F - 1.0) * z + F * (D + 1.0)
    return V0, V1, V2


def l_eval(mu: Params, z: float) -> float:
    """L(z) = z^(-2F) V1(z)^2 - 2 h0 V2(z); positive at z = 1 - p1 on Lambda."""
    if z <= 0.0:
        raise DomainError("l_eval needs z > 0")
    _, V1, V2 = _v_polys(mu, z)
    return z ** (-2.0 * mu.F) * V1 * V1 - 2.0 * conic_data(mu).h0 * V2


def l_at_boundary(D, F):
    """Vectorised L(1 - p1(mu), mu) over arrays of parameters."""
    D = np.asarray(D, dtype=float)
    F = np.asarray(F, dtype=float)
    a = D / (2.0 * (1.0 - F))
    b = (D - F + 1.0) / ((1.0 - F) * (1.0 - 2.0 * F))
    c = (F - D - 1.0) / (2.0 * F * (1.0 - F) * (1.0 - 2.0 * F))
    sq = np.sqrt(b * b - 4.0 * a * c)
    p1 = np.where(b < 0, 2.0 * c / (-b + sq), (-b - sq) / (2.0 * a))
    z = 1.0 - p1
    V1 = (z - 1.0) * (D * (z - 1.0) - 1.0)
    V2 = D * (F - 2.0) * z * z - (2.0 * D + 1.0) * (F - 1.0) * z + F * (D + 1.0)
    return z ** (-2.0 * F) * V1 * V1 - 2.0 * c * V2


def psi_big(model: PotentialModel, u: float, nu: float) -> float:
    """Closed form of (1/V') W[(V/(h0-V))^(nu/2), (h0-V) V^(1/2) R] at u."""
    if u == 0.0:
        raise SingularityError("Psi is singular at u = 0")
    return psi_big_at(model, model.point_from_u(u), nu)


def psi_big_at(model: PotentialModel, pt: ZPoint, nu: float) -> float:
    d = model.derivs(pt)
    V, W, V1, V2, V3 = d.V, d.W, d.V1, d.V2, d.V3
    h0 = model.h0
    num = V1 * V1 - 2.0 * V * V2
    psi = -4.0 * V * V * W * V1 * V3 - num * (V1 * V1 * (h0 * (nu - 1.0) + 3.0 * V) + 6.0 * W * V * V2)
    return psi / (2.0 * math.sqrt(V) * V1**5) * (V / W) ** (0.5 * nu)


class FEvenTheta:
    """theta -> f_even(sin theta), with 1 - sin^2 = cos^2 kept exact; also
    evaluable at distance e = pi/2 - theta."""

    def __init__(self, model: PotentialModel):
        self.model = model

    def __call__(self, t):
        return f_even(self.model, math.sin(t), math.cos(t) ** 2)

    def at_distance(self, e):
        return f_even(self.model, math.cos(e), math.sin(e) ** 2)


def f_even_theta(model: PotentialModel) -> FEvenTheta:
    return FEvenTheta(model)
