"""Loud's quadratic center X = (-y + xy) d/dx + (x + D x^2 + F y^2) d/dy.

Parameter geometry, the conic q(x) = a x^2 + b x + c of the first integral
and its roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import ComplexRootsError, DomainError, PoleError

_POLES = (0.0, 0.5, 1.0)
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class Params:
    """A parameter point mu = (D, F)."""

    D: float
    F: float

    @property
    def in_lambda(self) -> bool:
        return in_lambda(self)

    def require_regular_first_integral(self) -> None:
        if self.F in _POLES:
            raise PoleError(f"first integral has a pole at F={self.F}")

    @cached_property
    def conic(self) -> "ConicData":
        return conic_data(self)


@dataclass(frozen=True)
class ConicData:
    a: float
    b: float
    c: float
    p1: float
    p2: float
    h0: float

    def q(self, x: float) -> float:
        return (self.a * x + self.b) * x + self.c


def in_lambda(mu: Params) -> bool:
    """Strict membership in {F > 1, D < -1/2, D + F > 0}."""
    D, F = mu.D, mu.F
    return F > 1.0 and D < -0.5 and D + F > 0.0


def conic_data(mu: Params) -> ConicData:
    mu.require_regular_first_integral()
    D, F = mu.D, mu.F
    a = D / (2.0 * (1.0 - F))
    b = (D - F + 1.0) / ((1.0 - F) * (1.0 - 2.0 * F))
    c = (F - D - 1.0) / (2.0 * F * (1.0 - F) * (1.0 - 2.0 * F))
    h0 = (F - D - 1.0) / (2.0 * F * (F - 1.0) * (2.0 * F - 1.0))
    disc = b * b - 4.0 * a * c
    # a discriminant below its own rounding error is a double root (D = -F);
    # left alone, sqrt would split the root by ~1e-8
    if abs(disc) <= 64.0 * _EPS * max(b * b, abs(4.0 * a * c)):
        disc = 0.0
    if disc < 0.0:
        raise ComplexRootsError(f"b^2 - 4ac = {disc} < 0 at {mu}")
    sq = math.sqrt(disc)
    if a == 0.0:
        # degenerate conic: single root of b x + c
        if b == 0.0:
            raise ComplexRootsError(f"q is constant at {mu}")
        root = -c / b
        return ConicData(a, b, c, root, math.inf, h0)
    # p1 = (-b - sq)/(2a), p2 = (-b + sq)/(2a), evaluated without cancellation
    if b < 0.0:
        qq = 0.5 * (-b + sq)
        minus_root, plus_root = c / qq, qq / a
    else:
        qq = 0.5 * (-b - sq)
        minus_root, plus_root = qq / a, c / qq if qq != 0.0 else 0.0
    return ConicData(a, b, c, minus_root, plus_root, h0)


def vector_field(mu: Params, x: float, y: float) -> tuple[float, float]:
    return (-y + x * y, x + mu.D * x * x + mu.F * y * y)


def first_integral(mu: Params, x: float, y: float) -> float:
    """H = (1 - x)^(-2F) (y^2/2 - q(x)) on the branch x < 1."""
    if x >= 1.0:
        raise DomainError("first integral is taken on the branch x < 1")
    cd = conic_data(mu)
    return (1.0 - x) ** (-2.0 * mu.F) * (0.5 * y * y - cd.q(x))
