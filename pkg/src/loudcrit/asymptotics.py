"""Quantifiers: power-law behaviour of a function at an endpoint.

f is quantifiable at a finite endpoint b by alpha with limit l when
f(x) |b - x|^alpha -> l != 0, and at +inf when f(x) x^(-alpha) -> l.

Left-endpoint quantifiers of the potential family are all stored against the
distance u - u_left; the factor F in F u + 1 = F (u - u_left) is absorbed into
the limit by :func:`to_distance_convention`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateNu, DomainError, FitError, TieDegeneracyError
from .loud_core import Params
from .potential import PotentialModel

FIT_DECADES = 4.0
FIT_INNERMOST = 1e-8
FIT_OUTERMOST_INF = 1e4
FIT_POINTS_PER_DECADE = 12
FIT_DRIFT_TOL = 1e-3


@dataclass(frozen=True)
class Quantifier:
    endpoint: float  # finite b, or +-inf
    alpha: float
    limit: float
    alpha_ci: tuple[float, float] = (math.nan, math.nan)
    drift: float = 0.0

    def __post_init__(self):
        if self.limit == 0.0:
            raise FitError("a quantifier needs a nonzero limit")
        if not math.isfinite(self.alpha):
            raise FitError("non-finite quantifier")


def _lsq(logd, logf):
    A = np.vstack([logd, np.ones_like(logd)]).T
    coef, *_ = np.linalg.lstsq(A, logf, rcond=None)
    resid = logf - A @ coef
    dof = max(len(logd) - 2, 1)
    se = math.sqrt(resid @ resid / dof / np.sum((logd - logd.mean()) ** 2))
    return float(coef[0]), float(coef[1]), se


def estimate_quantifier(
    f: Callable[[float], float],
    endpoint: float,
    window: float = FIT_DECADES,
    *,
    approach: str = "below",
    distance: bool = False,
    innermost: float = FIT_INNERMOST,
    points_per_decade: int = FIT_POINTS_PER_DECADE,
    drift_tol: float = FIT_DRIFT_TOL,
) -> Quantifier:
    """Log-log least-squares fit of f near ``endpoint``.

    For a finite endpoint the samples sit at distances ``innermost * 10^k``,
    ``k in [0, window]``; ``approach="below"`` evaluates f(b - d), ``"above"``
    evaluates f(b + d).  With ``distance=True`` f receives d itself.  For
    +inf (-inf) the samples run from 1e4 outwards (|x| from 1e4 outwards).

    Raises FitError when the local slope of the first and last decade differ
    by more than ``drift_tol`` (non power-law behaviour such as logarithms).
    """
    npts = max(int(round(window * points_per_decade)) + 1, 4)
    infinite = math.isinf(endpoint)
    if infinite:
        t = np.logspace(math.log10(FIT_OUTERMOST_INF), math.log10(FIT_OUTERMOST_INF) + window, npts)
        xs = t if endpoint > 0 else -t
    else:
        t = np.logspace(math.log10(innermost), math.log10(innermost) + window, npts)
        if distance:
            xs = t
        elif approach == "below":
            xs = endpoint - t
        elif approach == "above":
            xs = endpoint + t
        else:
            raise DomainError(f"approach must be 'below' or 'above', not {approach!r}")
    vals = np.array([f(float(x)) for x in xs])
    if not np.all(np.isfinite(vals)) or np.any(vals == 0.0):
        raise FitError("function vanishes or is not finite inside the fit window")
    sign = np.sign(vals)
    if not np.all(sign == sign[0]):
        raise FitError("function changes sign inside the fit window")
    logt, logf = np.log(t), np.log(np.abs(vals))
    slope, icpt, se = _lsq(logt, logf)
    per = points_per_decade + 1
    s_first = _lsq(logt[:per], logf[:per])[0]
    s_last = _lsq(logt[-per:], logf[-per:])[0]
    drift = abs(s_first - s_last)
    if drift > drift_tol:
        raise FitError(f"slope drifts by {drift:.3g} across the window (not a pure power law)")
    alpha = slope if infinite else -slope
    limit = float(sign[0]) * math.exp(icpt)
    return Quantifier(endpoint, alpha, limit, (alpha - 2 * se, alpha + 2 * se), drift)


# --------------------------------------------------------------------- catalog
@dataclass(frozen=True)
class QuantifierCatalog:
    """Exponents and limits of h0 - V (beta, b) and of the Wronskian quotient
    (alpha, a) at both ends of (u_left, u_right), distance convention."""

    beta_l: float
    b_l: float
    beta_r: float
    b_r: float
    alpha_l: float
    a_l: float
    alpha_r: float
    a_r: float
    n: int = 0
    nus: tuple[float, ...] = ()
    flags: tuple[str, ...] = field(default=())


def to_distance_convention(coef: float, power: float, F: float) -> float:
    """Limit of c (F u + 1)^p rewritten as c' (u - u_left)^p."""
    return coef * F**power


def _right_end(model: PotentialModel):
    pt = model.point_from_right_gap(0.0)
    v1 = model.derivs(pt).V1
    return v1, model.r_at(pt)


def catalog_n0(mu: Params) -> QuantifierCatalog:
    model = PotentialModel(mu)
    D, F = mu.D, mu.F
    h0 = model.h0
    v1r, rr = _right_end(model)
    flags = ("F_EQ_2",) if F == 2.0 else ()
    return QuantifierCatalog(
        beta_l=(2.0 - 2.0 * F) / F,
        b_l=D * F ** (2.0 - 2.0 / F) / (2.0 * (1.0 - F)),
        beta_r=-1.0,
        b_r=v1r,
        alpha_l=1.0 - 2.0 / F,
        a_l=(F - 2.0) * h0**1.5 * F ** (2.0 / F - 1.0) / (D * (F - 1.0)),
        alpha_r=-1.0,
        a_r=rr * v1r * math.sqrt(h0),
        n=0,
        nus=(),
        flags=flags,
    )


def psi_left_limit(mu: Params, nu: float) -> tuple[float, float]:
    """(exponent, coefficient) of Psi ~ a (F u + 1)^e at u_left.

    a combines the leading monomial of psi,
    -(F-2)(F-2-nu(F-1)) D^3 (1+D-F)^2 / (2 F^2 (F-1)^3 (1-2F)^2) z^(6-2F),
    with V -> h0, V' ~ D z^(2-F) and h0 - V ~ D/(2-2F) z^(2-2F).
    """
    D, F = mu.D, mu.F
    e = (4.0 + nu - F * (3.0 + nu)) / F
    a = (
        -(F - 2.0)
        * (F - 2.0 - nu * (F - 1.0))
        * (-D) ** (-2.0 - nu / 2.0)
        * (F - D - 1.0) ** ((nu + 3.0) / 2.0)
        * F ** (-(nu + 3.0) / 2.0)
        * (F - 1.0) ** -2.5
        * (2.0 * F - 1.0) ** (-(nu + 3.0) / 2.0)
        * 2.0**-1.5
    )
    return e, a


def psi_right_limit(model: PotentialModel, nu: float) -> float:
    """b with Psi ~ b (u_right - u)^(-nu/2)."""
    v1r, rr = _right_end(model)
    return -(nu + 2.0) / 2.0 * rr * model.h0 ** ((nu + 1.0) / 2.0) * v1r ** (-nu / 2.0)


def catalog_n1(mu: Params, nu: float) -> QuantifierCatalog:
    D, F = mu.D, mu.F
    if F == 2.0:
        raise DegenerateNu("F = 2 kills the leading left coefficient")
    if nu == -2.0:
        raise DegenerateNu("nu = -2 kills the leading right coefficient")
    if abs(nu - (F - 2.0) / (F - 1.0)) < 1e-14:
        raise DegenerateNu("nu = (F-2)/(F-1) kills the leading left coefficient")
    base = catalog_n0(mu)
    model = PotentialModel(mu)
    e, a = psi_left_limit(mu, nu)
    return QuantifierCatalog(
        beta_l=base.beta_l,
        b_l=base.b_l,
        beta_r=base.beta_r,
        b_r=base.b_r,
        alpha_l=-e,
        a_l=to_distance_convention(a, e, F),
        alpha_r=nu / 2.0,
        a_r=psi_right_limit(model, nu),
        n=1,
        nus=(nu,),
    )


@dataclass(frozen=True)
class XiResult:
    xi: float
    side: str  # "left", "right" or "tie"
    tie_sum: float | None = None


def xi_value(catalog: QuantifierCatalog, nus=None, tie_rtol: float = 1e-12) -> XiResult:
    """xi = -min(alpha_l/beta_l, alpha_r/beta_r) - sum(nu)/2 - n(n+1)/2 + 1."""
    nus = tuple(catalog.nus if nus is None else nus)
    n = len(nus)
    if catalog.beta_l == 0.0 or catalog.beta_r == 0.0:
        raise DomainError("exponent ratios must be finite")
    rl = catalog.alpha_l / catalog.beta_l
    rr = catalog.alpha_r / catalog.beta_r
    if not (math.isfinite(rl) and math.isfinite(rr)):
        raise DomainError("exponent ratios must be finite")
    xi = -min(rl, rr) - 0.5 * sum(nus) - n * (n + 1) / 2 + 1.0
    if abs(rl - rr) <= tie_rtol * max(1.0, abs(rl), abs(rr)):
        sgn = (-1) ** (n * (n + 1) // 2)
        tr = catalog.a_r * catalog.b_r ** (-rr)
        tl = catalog.a_l * catalog.b_l ** (-rl)
        total = tr + sgn * tl
        if abs(total) < 1e-10 * max(abs(tr), abs(tl), 1e-300):
            raise TieDegeneracyError(f"tie condition fails: {tr} + {sgn}*{tl} ~ 0")
        return XiResult(xi, "tie", total)
    return XiResult(xi, "left" if rl < rr else "right")


def catalog_functions(model: PotentialModel, nu: float | None = None):
    """The functions the catalog describes, as callables of the endpoint distance.

    Returns {"depth_l", "depth_r", "quot_l", "quot_r"} where depth is h0 - V and
    quot is (h0 - V) V^(1/2) R for ``nu is None`` and Psi_nu otherwise.
    """
    from .potential import psi_big_at

    def depth(pt):
        return model.depth(pt)

    if nu is None:

        def quot(pt):
            return model.depth(pt) * math.sqrt(model.potential(pt)) * model.r_at(pt)

    else:

        def quot(pt):
            return psi_big_at(model, pt, nu)

    return {
        "depth_l": lambda d: depth(model.point_from_left_gap(d)),
        "depth_r": lambda d: depth(model.point_from_right_gap(d)),
        "quot_l": lambda d: quot(model.point_from_left_gap(d)),
        "quot_r": lambda d: quot(model.point_from_right_gap(d)),
    }


def left_fit_innermost(F: float, target: float = 1e-6, window: float = FIT_DECADES) -> float:
    """Innermost left-end distance so that the fit window's outer edge sees
    corrections of relative size ``target``.

    Left-end expansions of the potential family carry corrections in powers
    (F(u - u_left))^(1/F) and (F(u - u_left))^((2F-2)/F).
    """
    k = min(1.0, 2.0 * F - 2.0) / F
    return 10.0 ** (math.log10(target) / k - window)
