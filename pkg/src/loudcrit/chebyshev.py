"""Wronskians, the operator D_nu built on psi_nu, and momenta N_n.

Functions enter the Wronskian through a small derivative protocol: a callable
may expose ``derivatives(x, k) -> [f, f', ..., f^(k)]``; anything else is
differentiated by Richardson-extrapolated central differences.

The momentum integrals live on [0, 1) and are evaluated in the angle
theta = arcsin(x), where the weight collapses to tan(theta)^(2n - 2) and the
endpoint x = 1 becomes theta = pi/2.  Integrands that need 1 - x^2 near the
endpoint can be supplied directly as functions of theta (``theta_form``).
Such functions may also expose ``at_distance(e)``, their value at
theta = pi/2 - e; a float theta cannot resolve e below ~1e-16, so the last
panel of a momentum is then integrated in e.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DerivativeUnavailable, DivergenceError, DomainError, QuadratureError

HALF_PI = 0.5 * math.pi

# default base steps per derivative order, balanced against float round-off
# for three levels of h^2 extrapolation
_BASE_STEP = {1: 2e-3, 2: 5e-3, 3: 1e-2}
_RICHARDSON_LEVELS = 3
E_FLOOR = 1e-30  # smallest distance to pi/2 at which integrands are sampled


def _central(f, x, h, k):
    if k == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if k == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    if k == 3:
        return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) / (2.0 * h**3)
    raise DerivativeUnavailable(f"numeric derivatives implemented up to order 3, asked {k}")


def richardson_derivative(f, x, k, h=None, domain=(-math.inf, math.inf), levels=_RICHARDSON_LEVELS):
    """k-th derivative of f at x by extrapolated central differences."""
    if k == 0:
        return f(x)
    if k not in _BASE_STEP:
        raise DerivativeUnavailable(f"numeric derivatives implemented up to order 3, asked {k}")
    if h is None:
        h = _BASE_STEP[k] * max(1.0, abs(x))
    reach = 2.0 if k == 3 else 1.0
    room = min(x - domain[0], domain[1] - x)
    if room <= 0.0:
        raise DomainError(f"x={x} is not inside {domain}")
    h = min(h, 0.1 * room / reach)
    table = [_central(f, x, h / 2**i, k) for i in range(levels)]
    for j in range(1, levels):
        fac = 4.0**j
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
    return table[0]


def derivatives(f, x, k, domain=(-math.inf, math.inf)):
    """[f(x), f'(x), ..., f^(k)(x)] through the protocol or numerically."""
    if hasattr(f, "derivatives"):
        return list(f.derivatives(x, k))
    return [richardson_derivative(f, x, i, domain=domain) for i in range(k + 1)]


def wronskian(fns: Sequence[Callable], x: float, domain=(-math.inf, math.inf)) -> float:
    k = len(fns)
    if k == 0:
        return 1.0
    mat = np.empty((k, k))
    for j, f in enumerate(fns):
        mat[:, j] = derivatives(f, x, k - 1, domain)
    return float(np.linalg.det(mat))


def psi_nu(nu: float, x: float) -> float:
    if not 0.0 < x < 1.0:
        raise DomainError("psi_nu is defined on (0, 1)")
    return x**nu * (1.0 - x * x) ** (-1.0 - 0.5 * nu)


@dataclass(frozen=True)
class PsiNu:
    """psi_nu as a function of x with exact derivatives up to order 3."""

    nu: float

    def __call__(self, x):
        return psi_nu(self.nu, x)

    def derivatives(self, x, k):
        if k > 3:
            raise DerivativeUnavailable("PsiNu supplies derivatives up to order 3")
        nu = self.nu
        p = psi_nu(nu, x)
        om = 1.0 - x * x
        l1 = nu / x + (2.0 + nu) * x / om
        l2 = -nu / x**2 + (2.0 + nu) * (1.0 + x * x) / om**2
        l3 = 2.0 * nu / x**3 + (2.0 + nu) * 2.0 * x * (3.0 + x * x) / om**3
        out = [p, p * l1, p * (l2 + l1 * l1), p * (l3 + 3.0 * l1 * l2 + l1**3)]
        return out[: k + 1]


@dataclass(frozen=True)
class PsiNuTheta:
    """theta -> psi_nu(sin theta) = sec^2(theta) tan^nu(theta), with derivatives."""

    nu: float

    def __call__(self, t):
        return math.tan(t) ** self.nu / math.cos(t) ** 2

    def derivatives(self, t, k):
        if k > 3:
            raise DerivativeUnavailable("PsiNuTheta supplies derivatives up to order 3")
        nu = self.nu
        p = self(t)
        s2, c2 = math.sin(2 * t), math.cos(2 * t)
        sec2 = 1.0 / math.cos(t) ** 2
        tn = math.tan(t)
        l1 = 2.0 * nu / s2 + 2.0 * tn
        l2 = -4.0 * nu * c2 / s2**2 + 2.0 * sec2
        l3 = 8.0 * nu * (s2 * s2 + 2.0 * c2 * c2) / s2**3 + 4.0 * sec2 * tn
        out = [p, p * l1, p * (l2 + l1 * l1), p * (l3 + 3.0 * l1 * l2 + l1**3)]
        return out[: k + 1]


def cheb_operator(nus: Sequence[float], f: Callable, x: float) -> float:
    """D_nu[f](x) = (x(1-x^2))^(n(n+1)/2) W[psi_nu1..psi_nun, f] / prod psi_nui."""
    n = len(nus)
    if n == 0:
        return f(x)
    if not 0.0 < x < 1.0:
        raise DomainError("D_nu acts on functions of (0, 1)")
    basis = [PsiNu(nu) for nu in nus]
    w = wronskian(basis + [f], x, domain=(0.0, 1.0))
    prod = math.prod(b(x) for b in basis)
    return (x * (1.0 - x * x)) ** (n * (n + 1) // 2) * w / prod


@dataclass(frozen=True)
class PsiNuDistance:
    """e -> psi_nu(cos e) = cos^nu(e) / sin^(nu+2)(e), with e-derivatives."""

    nu: float

    def __call__(self, e):
        return math.cos(e) ** self.nu / math.sin(e) ** (self.nu + 2.0)

    def derivatives(self, e, k):
        if k > 3:
            raise DerivativeUnavailable("PsiNuDistance supplies derivatives up to order 3")
        nu = self.nu
        p = self(e)
        tn, ct = math.tan(e), 1.0 / math.tan(e)
        sec2, csc2 = 1.0 + tn * tn, 1.0 + ct * ct
        l1 = -nu * tn - (nu + 2.0) * ct
        l2 = -nu * sec2 + (nu + 2.0) * csc2
        l3 = -2.0 * nu * sec2 * tn - 2.0 * (nu + 2.0) * csc2 * ct
        out = [p, p * l1, p * (l2 + l1 * l1), p * (l3 + 3.0 * l1 * l2 + l1**3)]
        return out[: k + 1]


def cheb_operator_theta(nus: Sequence[float], f_theta: Callable, t: float) -> float:
    """Same operator with f given as theta -> f(sin theta); evaluated at x = sin t."""
    n = len(nus)
    if n == 0:
        return f_theta(t)
    basis = [PsiNuTheta(nu) for nu in nus]
    w = wronskian(basis + [f_theta], t, domain=(0.0, HALF_PI))
    prod = math.prod(b(t) for b in basis)
    return (math.sin(t) * math.cos(t)) ** (n * (n + 1) // 2) * w / prod


def cheb_operator_distance(nus: Sequence[float], f_dist: Callable, e: float) -> float:
    """The operator at theta = pi/2 - e, with f given as e -> f(cos e).

    Differentiating in e flips the sign of odd derivatives, so the Wronskian
    picks up (-1)^(n(n+1)/2).
    """
    n = len(nus)
    if n == 0:
        return f_dist(e)
    basis = [PsiNuDistance(nu) for nu in nus]
    w = wronskian(basis + [f_dist], e, domain=(0.0, HALF_PI))
    prod = math.prod(b(e) for b in basis)
    k = n * (n + 1) // 2
    return (-1) ** k * (math.sin(e) * math.cos(e)) ** k * w / prod


class ChebOperator:
    """theta-form D_nu[f]; also evaluable at distance e from pi/2 when f is."""

    def __init__(self, nus: Sequence[float], f_theta: Callable):
        self.nus = tuple(nus)
        self.f = f_theta
        if hasattr(f_theta, "at_distance"):
            self.at_distance = self._at_distance

    def __call__(self, t):
        return cheb_operator_theta(self.nus, self.f, t)

    def _at_distance(self, e):
        return cheb_operator_distance(self.nus, self.f.at_distance, e)


@dataclass(frozen=True)
class MomentumValue:
    n: int
    value: float
    abs_error: float


def _theta_integrand(f, n, theta_form):
    p = 2 * n - 2

    def g(t):
        val = f(t) if theta_form else f(math.sin(t))
        return val * math.tan(t) ** p if p else val

    return g


def fit_endpoint_exponent(f, theta_form=False, decades=(7.0, 6.0), npts=12):
    """Exponent xi with f ~ (1 - x)^(-xi) from the last decade before x = 1."""
    d = np.logspace(-decades[0], -decades[1], npts)
    if theta_form:
        # 1 - sin(pi/2 - e) ~ e^2/2
        vals = np.array([f(HALF_PI - math.sqrt(2.0 * di)) for di in d])
    else:
        vals = np.array([f(1.0 - di) for di in d])
    if np.any(vals == 0.0) or not np.all(np.isfinite(vals)):
        return 0.0, 0.0
    A = np.vstack([np.log(d), np.ones_like(d)]).T
    coef, *_ = np.linalg.lstsq(A, np.log(np.abs(vals)), rcond=None)
    resid = np.log(np.abs(vals)) - A @ coef
    se = math.sqrt(resid @ resid / (len(d) - 2) / np.sum((np.log(d) - np.log(d).mean()) ** 2))
    xi = -float(coef[0])
    # analytic f(1) != 0 gives a slope of order d; read it as exactly zero
    if abs(xi) < max(2.0 * se, 1e-5):
        xi = 0.0
    return xi, 2.0 * se


def momentum(
    n: int,
    f: Callable,
    exponent: float | None = None,
    *,
    theta_form: bool = False,
    epsabs: float = 1e-9,
    epsrel: float = 1e-7,
    split: float = 0.25,
) -> MomentumValue:
    """n-th momentum int_0^1 f(x) (1-x^2)^(-1/2) (x/sqrt(1-x^2))^(2n-2) dx.

    ``exponent`` is the quantifier xi of f at x = 1 (f ~ (1-x)^(-xi)); when
    omitted it is fitted.  In theta the integrand then behaves like
    (pi/2 - theta)^(-kappa) with kappa = 2 xi + 2n - 2, and the last panel is
    integrated against that algebraic weight.
    """
    if n < 1:
        raise DomainError("momenta are indexed from n = 1")
    if exponent is None:
        xi, band = fit_endpoint_exponent(f, theta_form)
    else:
        xi, band = exponent, 0.0
    kappa = 2.0 * xi + 2.0 * n - 2.0
    if kappa - 2.0 * band >= 1.0:
        raise DivergenceError(f"N_{n} diverges: endpoint exponent -{kappa:.4g} <= -1")
    g = _theta_integrand(f, n, theta_form)
    cut = HALF_PI - split
    v1, e1 = quad(g, 0.0, cut, epsabs=epsabs, epsrel=epsrel, limit=200)
    if theta_form and hasattr(f, "at_distance"):
        p = 2 * n - 2

        def tail(e):
            # CC nodes include e = 0; the weighted integrand is continuous there
            e = max(e, E_FLOOR)
            return f.at_distance(e) * math.tan(e) ** (-p) * e**kappa

        lo_t, f_t = 0.0, tail
    else:
        lo_t = None
    if lo_t is not None and abs(kappa) >= 1e-14:
        v2, e2 = quad(f_t, 0.0, split, weight="alg", wvar=(-kappa, 0.0), epsabs=epsabs, epsrel=epsrel, limit=200)
    elif lo_t is not None:
        v2, e2 = quad(lambda e: f.at_distance(e) * math.tan(e) ** (-(2 * n - 2)), 0.0, split, epsabs=epsabs, epsrel=epsrel, limit=200)
    elif abs(kappa) < 1e-14:
        v2, e2 = quad(g, cut, HALF_PI, epsabs=epsabs, epsrel=epsrel, limit=200)
    else:
        # sin t rounds to 1 within ~1e-8 of pi/2; the weighted integrand is
        # regular there, so holding it constant costs O(clamp)
        clamp = HALF_PI - (1e-13 if theta_form else 1e-7)
        v2, e2 = quad(
            lambda t: g(min(t, clamp)) * (HALF_PI - min(t, clamp)) ** kappa,
            cut,
            HALF_PI,
            weight="alg",
            wvar=(0.0, -kappa),
            epsabs=epsabs,
            epsrel=epsrel,
            limit=200,
        )
    val, err = v1 + v2, e1 + e2
    if not (math.isfinite(val) and math.isfinite(err)):
        raise QuadratureError(f"N_{n} quadrature returned {val} +- {err}")
    return MomentumValue(n, val, err)


def recursion_coefficient(nus: Sequence[float], ell: int) -> float:
    """c_n (1 - 2 ell - nu_n) with c_1 = 1 and c_n = prod_{i<n} (nu_n - nu_i)."""
    n = len(nus)
    if n == 0:
        raise DomainError("the recursion needs at least one nu")
    c = math.prod(nus[-1] - v for v in nus[:-1]) if n >= 2 else 1.0
    return c * (1.0 - 2.0 * ell - nus[-1])


def momentum_recursion(
    nus: Sequence[float],
    f_theta: Callable,
    ell: int,
    exponent: float | None = None,
    **quad_kw,
) -> tuple[MomentumValue, MomentumValue, float]:
    """Both sides of N_ell[D_nu_n f] = c_n (1 - 2 ell - nu_n) N_ell[D_nu_(n-1) f].

    ``f_theta`` is theta -> f(sin theta).  Returns (lhs, inner, coefficient);
    the right-hand side is ``coefficient * inner.value``.  The operator D keeps
    the endpoint exponent of f, so ``exponent`` serves both momenta.
    """
    nus = list(nus)
    coef = recursion_coefficient(nus, ell)

    lhs = momentum(ell, ChebOperator(nus, f_theta), exponent, theta_form=True, **quad_kw)
    rhs = momentum(ell, ChebOperator(nus[:-1], f_theta), exponent, theta_form=True, **quad_kw)
    return lhs, rhs, coef
