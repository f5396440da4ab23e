"""Bifurcation coefficient Delta(mu) and its zero set D = G(F), F in (1, 3/2)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, LoudError, NoBracketError, QuadratureError
from .loud_core import Params, conic_data, in_lambda

F_GUARD = 1e-4
BRACKET_OFFSET = 1e-6
DELTA_EPSABS = 1e-13


def _check_range(F):
    if not (1.0 < F < 1.5):
        raise DomainError(f"Delta is defined for F in (1, 3/2), got F={F}")


def delta_integral(mu: Params, epsabs: float = DELTA_EPSABS) -> tuple[float, float]:
    """I = int_0^1 (u^(2-2F) (k(u-1)+1)^(2F-1) - 1) (1-u)^(-3/2) du, k = (1-p2)/(1-p1).

    [0, 1/2]: algebraic weight u^(2-2F) for the integrable singularity at 0.
    [1/2, 1]: 1 - u = t^2, where the bracket vanishes like t^2.
    """
    F = mu.F
    cd = conic_data(mu)
    k = (1.0 - cd.p2) / (1.0 - cd.p1)

    def head(u):
        return (k * (u - 1.0) + 1.0) ** (2.0 * F - 1.0) * (1.0 - u) ** -1.5

    ia, ea = quad(head, 0.0, 0.5, weight="alg", wvar=(2.0 - 2.0 * F, 0.0), epsabs=epsabs, epsrel=1e-13, limit=200)
    ia -= 2.0 * (math.sqrt(2.0) - 1.0)

    def tail(t):
        t2 = t * t
        br = math.expm1((2.0 - 2.0 * F) * math.log1p(-t2) + (2.0 * F - 1.0) * math.log1p(-k * t2))
        return 2.0 * br / t2

    ib, eb = quad(tail, 0.0, math.sqrt(0.5), epsabs=epsabs, epsrel=1e-13, limit=200)
    return ia + ib, ea + eb


def delta(mu: Params, epsabs: float = DELTA_EPSABS) -> float:
    _check_range(mu.F)
    if not in_lambda(mu):
        raise DomainError(f"{mu} is not in Lambda")
    cd = conic_data(mu)
    integral, err = delta_integral(mu, epsabs)
    if not (math.isfinite(integral) and err < 1e-6):
        raise QuadratureError(f"Delta integral did not converge ({integral} +- {err})")
    pref = (-1.0 / math.sqrt(2.0 * cd.a)) / ((cd.p2 - cd.p1) * (1.0 - cd.p1))
    return pref * (2.0 - integral)


@dataclass(frozen=True)
class CurvePoint:
    F: float
    G: float
    residual: float
    bracket: tuple[float, float]
    low_confidence: bool = False
    error: str | None = None
    sign_changes: int = 1


def curve_g(F: float, tol: float = 1e-12, scan: int = 24) -> CurvePoint:
    """Zero of D -> Delta(D, F) on (-F, -1/2).

    A coarse scan locates the first sign change (and counts any others),
    then Brent's method refines it.
    """
    _check_range(F)
    lo, hi = -F + BRACKET_OFFSET, -0.5 - BRACKET_OFFSET
    grid = np.linspace(lo, hi, scan + 1)
    vals = [delta(Params(float(d), F)) for d in grid]
    changes = [i for i in range(scan) if vals[i] * vals[i + 1] < 0.0]
    if not changes:
        raise NoBracketError(f"Delta(., {F}) has no sign change on ({lo}, {hi})")
    i = changes[0]
    a, b = float(grid[i]), float(grid[i + 1])
    G = brentq(lambda d: delta(Params(d, F)), a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
    res = abs(delta(Params(G, F)))
    slope = abs(vals[i + 1] - vals[i]) / (b - a)
    low = F - 1.0 < F_GUARD or 1.5 - F < F_GUARD or res > tol * max(1.0, slope)
    return CurvePoint(F, G, res, (a, b), low, None, len(changes))


def tabulate_curve(F_grid, tol: float = 1e-12) -> list[CurvePoint]:
    out = []
    for F in F_grid:
        F = float(F)
        try:
            out.append(curve_g(F, tol))
        except LoudError as exc:
            out.append(CurvePoint(F, math.nan, math.nan, (math.nan, math.nan), True, f"{type(exc).__name__}: {exc}", 0))
    return out
