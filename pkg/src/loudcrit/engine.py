"""Decision procedure for the criticality of the outer polycycle of Loud's centers."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .asymptotics import catalog_n0, catalog_n1, xi_value
from .chebyshev import ChebOperator, MomentumValue, momentum
from .config import Tolerances, worker_count
from .delta import curve_g, delta
from .errors import DivergenceError, LoudError, TieDegeneracyError
from .loud_core import Params, in_lambda
from .potential import PotentialModel, f_even_theta

REASONS = ("F_EQ_2", "F_EQ_3_2_LOG", "D_EQ_MINUS_HALF", "OUT_OF_LAMBDA", "TIE_FAIL")


@dataclass(frozen=True)
class CriticalityVerdict:
    mu: Params
    case_taken: str  # "A", "B1(j)", "B2(m)", "LowerBoundOnly" or "Inconclusive(reason)"
    xi: float | None = None
    n_used: int = 0
    nu_used: tuple[float, ...] = ()
    bound: int | None = None
    lower_bound: int | None = None
    momenta: tuple[MomentumValue, ...] = ()
    flags: tuple[str, ...] = ()
    a_l: float | None = None

    @property
    def regular(self) -> bool:
        return self.bound == 0

    @property
    def inconclusive(self) -> bool:
        return self.case_taken.startswith("Inconclusive")

    def record(self) -> dict:
        return {
            "mu": [self.mu.D, self.mu.F],
            "case": self.case_taken,
            "xi": self.xi,
            "bound": self.bound,
            "lower_bound": self.lower_bound,
            "momenta": [{"n": m.n, "value": m.value, "err": m.abs_error} for m in self.momenta],
            "flags": list(self.flags),
            "a_l": self.a_l,
        }


def _inconclusive(mu, reason, **kw):
    return CriticalityVerdict(mu, f"Inconclusive({reason})", flags=(reason,) + tuple(kw.pop("flags", ())), **kw)


def order_m(xi: float) -> int:
    """The m in N with xi + m in [1/2, 3/2)."""
    return max(1, math.ceil(0.5 - xi))


def n1_of_mu(model: PotentialModel, tol: Tolerances = Tolerances()) -> MomentumValue:
    """First momentum of f_even; finite only when xi(mu) < 1/2."""
    xi = xi_value(catalog_n0(model.mu)).xi
    if xi >= 0.5:
        raise DivergenceError(f"N1 diverges: xi = {xi:.6g} >= 1/2")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return momentum(1, f_even_theta(model), xi, theta_form=True, epsabs=tol.quad)


def n1_escalated(model: PotentialModel, nu: float = -1.0, tol: Tolerances = Tolerances()) -> MomentumValue:
    """N1[D_nu f_even]; identically zero for nu = -1."""
    f = f_even_theta(model)
    xi = xi_value(catalog_n0(model.mu)).xi
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return momentum(1, ChebOperator([nu], f), xi, theta_form=True, epsabs=tol.quad)


@lru_cache(maxsize=4096)
def curve_point(F: float, tol: float = 1e-12):
    return curve_g(F, tol)


def delta_sign_change(F: float, G: float, h: float = 1e-3) -> bool:
    lo, hi = delta(Params(G - h, F)), delta(Params(G + h, F))
    return lo * hi < 0.0


def classify(mu: Params, tol: Tolerances = Tolerances()) -> CriticalityVerdict:
    D, F = mu.D, mu.F
    if not in_lambda(mu):
        return _inconclusive(mu, "OUT_OF_LAMBDA")
    if abs(F - 2.0) < tol.guard:
        # a_l changes sign across F = 2, hence at least one critical period
        return _inconclusive(mu, "F_EQ_2", lower_bound=1)
    if abs(F - 1.5) < tol.guard:
        return _inconclusive(mu, "F_EQ_3_2_LOG")
    if abs(D + 0.5) < tol.guard:
        return _inconclusive(mu, "D_EQ_MINUS_HALF")

    stage = "catalog_n0"
    try:
        cat = catalog_n0(mu)
        try:
            xr = xi_value(cat)
        except TieDegeneracyError:
            return _inconclusive(mu, "TIE_FAIL")
        xi = xr.xi
        flags = (f"XI_SIDE_{xr.side.upper()}",)
        if xi > 0.5:
            return CriticalityVerdict(mu, "A", xi, 0, (), 0, 0, (), flags, cat.a_l)

        stage = "n1"
        model = PotentialModel(mu)
        n1 = n1_of_mu(model, tol)
        m = order_m(xi)
        if abs(n1.value) > tol.n1_zero_factor * n1.abs_error:
            return CriticalityVerdict(mu, "B1(1)", xi, 0, (), 0, 0, (n1,), flags, cat.a_l)

        stage = "curve"
        if not (1.0 < F < 1.5):
            return _inconclusive(mu, "N1_UNRESOLVED", xi=xi, momenta=(n1,), a_l=cat.a_l)
        cp = curve_point(F, tol.curve)
        if abs(D - cp.G) >= tol.on_curve:
            return _inconclusive(mu, "N1_UNRESOLVED", xi=xi, momenta=(n1,), a_l=cat.a_l)
        lower = 1 if delta_sign_change(F, cp.G) else None
        flags = flags + ("ON_CURVE",)

        stage = "escalation"
        cat1 = catalog_n1(mu, -1.0)
        xi1 = xi_value(cat1).xi
        m1 = order_m(xi1)
        n1e = n1_escalated(model, -1.0, tol)
        moms = (n1, n1e)
        # N_1[D_{-1} f] vanishes identically (recursion coefficient 1 - 2 - nu = 0)
        if m1 == 1 and xi1 + m1 not in (0.5, 1.0) and 0.0 < xi1 < 0.5:
            return CriticalityVerdict(mu, "B2(1)", xi1, 1, (-1.0,), 1, lower, moms, flags, cat.a_l)
        return CriticalityVerdict(mu, "LowerBoundOnly", xi1, 1, (-1.0,), None, lower, moms, flags, cat.a_l)
    except LoudError as exc:
        return _inconclusive(mu, f"STAGE_{stage.upper()}", flags=(f"{type(exc).__name__}: {exc}",))


# ------------------------------------------------------------------ scans
def lambda_grid(window, grid_n: int, include_curve: bool = True, curve_tol: float = 1e-12):
    """Grid nodes of window = (D_lo, D_hi, F_lo, F_hi), plus on-curve nodes
    (G(F), F) for the grid F in (4/3, 3/2) when ``include_curve``."""
    d0, d1, f0, f1 = window
    Ds = np.linspace(d0, d1, grid_n)
    Fs = np.linspace(f0, f1, grid_n)
    nodes = [Params(float(D), float(F)) for F in Fs for D in Ds]
    if include_curve:
        for F in Fs:
            if 4.0 / 3.0 < F < 1.5:
                try:
                    nodes.append(Params(curve_point(float(F), curve_tol).G, float(F)))
                except LoudError:
                    pass
    return nodes


def _classify_star(args):
    return classify(*args)


def scan_lambda(window, grid_n: int, tol: Tolerances = Tolerances(), include_curve: bool = True, workers: int | None = None):
    """Classify every node; results keep grid order."""
    nodes = lambda_grid(window, grid_n, include_curve, tol.curve)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(nodes) < 2:
        return [classify(mu, tol) for mu in nodes]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_classify_star, [(mu, tol) for mu in nodes], chunksize=8))
