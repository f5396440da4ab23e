"""Period function of the potential system and its behaviour at the polycycle."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .errors import (
    ConvergenceError,
    DomainError,
    ExtrapolationError,
    FitError,
    QuadratureError,
    RootError,
)
from .loud_core import Params, conic_data, vector_field
from .potential import PotentialModel, ZPoint

HALF_PI = 0.5 * math.pi
PERIOD_EPSREL = 1e-12
MIN_GAP = 1e-14  # relative to h0; below this the level solves lose meaning


@dataclass(frozen=True)
class PeriodSample:
    h: float
    T: float
    u_minus: float
    u_plus: float
    quad_error: float
    left_gap: float = math.nan  # u_minus - u_left, resolved below the ulp of u_minus


@dataclass(frozen=True)
class PolycycleAsymptotics:
    gamma_fit: float
    delta_star_fit: float
    h_window: tuple[float, float]
    residual: float = 0.0


def _check_energy(model, h, gap):
    if gap is None:
        gap = model.h0 - h
    if not (0.0 < h and gap > 0.0):
        raise DomainError(f"energy h={h} outside (0, h0={model.h0})")
    if gap < MIN_GAP * model.h0:
        raise DomainError(f"h0 - h = {gap:.3g} below level-solve resolution")
    return gap


def _level_pair(model, h, gap, t):
    y = math.sqrt(h) * math.sin(t)
    g = gap + h * math.cos(t) ** 2
    try:
        return model.solve_level(y, g), model.solve_level(-y, g)
    except ConvergenceError as exc:
        raise RootError(str(exc)) from exc


def _breakpoints(h, gap):
    """Panel edges clustering toward pi/2 on the scale sqrt(gap/h), where the
    integrands peak as the orbit nears the polycycle."""
    w = math.sqrt(gap / h)
    if w > 0.1:
        return None
    eps = np.geomspace(0.5, max(w, 1e-300), max(2, int(math.log10(0.5 / w) * 2) + 1))
    return list(HALF_PI - eps)


def period_energy(model: PotentialModel, h: float, gap: float | None = None) -> PeriodSample:
    """T(h) = sqrt(2) int_{-pi/2}^{pi/2} (g^-1)'(sqrt(h) sin t) dt.

    ``gap`` = h0 - h; pass it when known more accurately than the difference.
    """
    gap = _check_energy(model, h, gap)

    def integrand(t):
        p, m = _level_pair(model, h, gap, t)
        return model.ginv_d1(p) + model.ginv_d1(m)

    val, err = quad(integrand, 0.0, HALF_PI, epsabs=0.0, epsrel=PERIOD_EPSREL, limit=400, points=_breakpoints(h, gap))
    if not math.isfinite(val):
        raise QuadratureError(f"period quadrature failed at h={h}")
    root = math.sqrt(h)
    sq2 = math.sqrt(2.0)
    up = model.u_of(model.solve_level(root, gap))
    pm = model.solve_level(-root, gap)
    left_gap = math.exp(-model.mu.F * pm.s) / model.mu.F
    return PeriodSample(h, sq2 * val, model.u_of(pm), up, sq2 * err, left_gap)


def period_derivative_integral(model: PotentialModel, h: float, gap: float | None = None) -> tuple[float, float]:
    """T'(h) = sqrt(2/h) int_0^{pi/2} sin t (R(u+) - R(u-)) dt, using (g^-1)'' = 2R."""
    gap = _check_energy(model, h, gap)

    def integrand(t):
        p, m = _level_pair(model, h, gap, t)
        return math.sin(t) * (model.r_at(p) - model.r_at(m))

    val, err = quad(integrand, 0.0, HALF_PI, epsabs=0.0, epsrel=1e-10, limit=500, points=_breakpoints(h, gap))
    c = math.sqrt(2.0 / h)
    return c * val, c * err


def period_derivative(model: PotentialModel, h: float, gap: float | None = None, method: str = "difference") -> float:
    """T'(h).  "difference": central difference with step max(1e-8, 1e-4 (h0-h))
    capped at (h0-h)/4; "integral": differentiation under the integral sign."""
    gap = _check_energy(model, h, gap)
    if method == "integral":
        return period_derivative_integral(model, h, gap)[0]
    if method != "difference":
        raise ValueError(f"unknown method {method!r}")
    dh = min(max(1e-8, 1e-4 * gap), 0.25 * gap, 0.25 * h)
    tp = period_energy(model, h + dh, gap - dh).T
    tm = period_energy(model, h - dh, gap + dh).T
    return (tp - tm) / (2.0 * dh)


# ------------------------------------------------------------- section s
def _section_point(model: PotentialModel, s: float) -> ZPoint:
    if not (0.0 < s < model.conic.p1):
        raise DomainError(f"s={s} outside (0, p1={model.conic.p1})")
    return model._point_from_delta(s)


def zeta(model: PotentialModel, s: float) -> tuple[float, float]:
    """(zeta(s), h0 - zeta(s)) with zeta(s) = V(phi(1 - p1 + s))."""
    pt = _section_point(model, s)
    return model.potential(pt), model.depth(pt)


def zeta_prime(model: PotentialModel, s: float) -> float:
    """d zeta/ds = -z^(-2F-1) w (D w - 1), z = 1 - p1 + s; negative on the section."""
    D, F = model.mu.D, model.mu.F
    z = model.z1 + s
    w = z - 1.0
    return -(z ** (-2.0 * F - 1.0)) * w * (D * w - 1.0)


def period_section(model: PotentialModel, s: float) -> float:
    """P(s) = T(zeta(s)): period of the Loud orbit through (p1 - s, 0)."""
    h, gap = zeta(model, s)
    return period_energy(model, h, gap).T


def p_prime(model: PotentialModel, s: float, method: str = "difference") -> float:
    """P'(s).  The difference route differentiates P in s directly."""
    if method == "integral":
        h, gap = zeta(model, s)
        return period_derivative_integral(model, h, gap)[0] * zeta_prime(model, s)
    ds = 1e-3 * s
    return (period_section(model, s + ds) - period_section(model, s - ds)) / (2.0 * ds)


def _richardson_limit(s, vals, exponents):
    """Generalized Richardson on a geometric ladder: removes c_k s^e_k terms."""
    s = np.asarray(s, float)
    r = s[1] / s[0]
    table = np.asarray(vals, float)
    for e in exponents:
        if len(table) < 2:
            break
        q = r**e
        table = (table[1:] - q * table[:-1]) / (1.0 - q)
    return table


def limit_p_prime(model: PotentialModel, ladder=(1e-4, 1e-8), n: int = 9, tol: float = 1e-4) -> float:
    """lim_{s -> 0+} P'(s), extrapolated from a geometric s-ladder.

    Near the section endpoint P'(s) - lim ~ c1 s^k + c2 s + c3 s^(k+1) with
    k = (3-2F)/(2F-2) coming from the outer (infinite) end of the well; the
    s^(1/2) term of the inner end cancels.  Three Richardson sweeps remove
    those terms (at k = 1 the repeated sweep also removes s log s).  The last
    extrapolants must agree to ``tol`` times the ladder scale or
    ExtrapolationError is raised.
    """
    F = model.mu.F
    if not (1.0 < F < 1.5):
        raise DomainError(f"lim P'(s) is the bifurcation coefficient only for F in (1, 3/2), got F={F}")
    k = (3.0 - 2.0 * F) / (2.0 * F - 2.0)
    s = np.geomspace(ladder[0], ladder[1], n)
    vals = np.array([p_prime(model, float(si), "integral") for si in s])
    ext = _richardson_limit(s, vals, [k, 1.0, k + 1.0])
    best = float(ext[-1])
    spread = float(np.ptp(ext[-3:]))
    if not math.isfinite(best) or spread > tol * float(np.max(np.abs(vals))):
        raise ExtrapolationError(f"s-ladder extrapolation did not settle (spread {spread:.3g}, value {best:.6g})")
    return best


def endpoint_t_prime(model: PotentialModel, n1: float) -> float:
    """lim_{h -> h0} T'(h) = N_1 / (sqrt(2) h0)."""
    return n1 / (math.sqrt(2.0) * model.h0)


# -------------------------------------------------------- polycycle fit
def fit_polycycle_asymptotics(
    model: PotentialModel,
    gaps=(1e-7, 1e-11),
    n: int = 13,
    method: str = "integral",
    drift_tol: float = 0.02,
) -> PolycycleAsymptotics:
    """Fit T'(h) ~ Delta* (h0 - h)^gamma on a geometric ladder of h0 - h
    (``gaps`` relative to h0)."""
    h0 = model.h0
    g = np.geomspace(gaps[0], gaps[1], n) * h0
    if g.min() < MIN_GAP * h0:
        raise FitError("h-ladder lies below the level-solve resolution")
    try:
        tp = np.array([period_derivative(model, h0 - gi, gi, method) for gi in g])
    except (DomainError, RootError, QuadratureError) as exc:
        raise FitError(f"T' unavailable on the ladder: {exc}") from exc
    if not np.all(np.isfinite(tp)) or np.any(tp == 0.0):
        raise FitError("T' vanishes or is not finite on the ladder")
    sgn = np.sign(tp)
    if np.any(sgn != sgn[0]):
        raise FitError("T' changes sign on the ladder")
    x, y = np.log(g), np.log(np.abs(tp))
    A = np.vstack([x, np.ones_like(x)]).T
    (gamma, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    half = n // 2
    s1 = np.polyfit(x[: half + 1], y[: half + 1], 1)[0]
    s2 = np.polyfit(x[half:], y[half:], 1)[0]
    if abs(s1 - s2) > drift_tol:
        raise FitError(f"log-log slope drifts by {abs(s1 - s2):.3g} (not a pure power law)")
    resid = float(np.max(np.abs(y - A @ np.array([gamma, icpt]))))
    return PolycycleAsymptotics(float(gamma), float(sgn[0] * math.exp(icpt)), (h0 - g[0], h0 - g[-1]), resid)


# ------------------------------------------------------ critical periods
@dataclass(frozen=True)
class CriticalPeriodScan:
    count: int
    locations: tuple[float, ...]
    flags: tuple[str, ...] = ()


def scan_critical_periods(
    model: PotentialModel,
    h_lo: float,
    h_hi: float,
    n_samples: int,
    spacing: str = "gap",
    method: str = "integral",
) -> CriticalPeriodScan:
    """Sign changes of T' on a sample grid, each refined by Brent's method.

    ``spacing="gap"`` places samples geometrically in h0 - h, which resolves
    critical periods squeezed against the polycycle.
    """
    h0 = model.h0
    if not (0.0 < h_lo < h_hi < h0):
        raise DomainError("need 0 < h_lo < h_hi < h0")
    if n_samples < 2:
        return CriticalPeriodScan(0, ())
    if spacing == "gap":
        gaps = np.geomspace(h0 - h_lo, h0 - h_hi, n_samples)
    else:
        gaps = h0 - np.linspace(h_lo, h_hi, n_samples)
    flags = []

    def tprime(gap):
        return period_derivative(model, h0 - gap, gap, method)

    vals = []
    for gp in gaps:
        try:
            vals.append(tprime(float(gp)))
        except (DomainError, RootError, QuadratureError):
            vals.append(math.nan)
            flags.append("SAMPLE_FAILED")
    locs = []
    for i in range(n_samples - 1):
        a, b = vals[i], vals[i + 1]
        if math.isfinite(a) and math.isfinite(b) and a * b < 0.0:
            try:
                gr = brentq(tprime, float(gaps[i + 1]), float(gaps[i]), rtol=1e-10)
                locs.append(h0 - gr)
            except (ValueError, RootError, QuadratureError):
                locs.append(h0 - math.sqrt(gaps[i] * gaps[i + 1]))
                flags.append("REFINE_FAILED")
    return CriticalPeriodScan(len(locs), tuple(locs), tuple(dict.fromkeys(flags)))


def count_critical_periods(model: PotentialModel, h_lo: float, h_hi: float, n_samples: int, **kw) -> int:
    return scan_critical_periods(model, h_lo, h_hi, n_samples, **kw).count


# ----------------------------------------------------------- ODE oracles
def loud_period(mu: Params, s: float, rtol: float = 1e-12, atol: float = 1e-12) -> float:
    """Period of the Loud orbit through (p1 - s, 0), by direct integration.

    The orbit is started on the section {y = 0, x < 1}; the return is the
    first crossing of y = 0 in the starting direction back near x0.
    """
    p1 = conic_data(mu).p1
    x0 = p1 - s

    def rhs(t, v):
        return vector_field(mu, v[0], v[1])

    # orientation: dy/dt = x + D x^2 + F y^2 at (x0, 0) fixes the crossing direction
    direction = 1.0 if x0 * (1.0 + mu.D * x0) > 0.0 else -1.0

    def back(t, v):
        return v[1]

    back.direction = direction
    back.terminal = False
    sol = solve_ivp(rhs, (0.0, 1e3), [x0, 0.0], method="DOP853", rtol=rtol, atol=atol, events=back, dense_output=False)
    times = [t for t, yv in zip(sol.t_events[0], sol.y_events[0]) if t > 1e-8 and abs(yv[0] - x0) < 1e-4 * max(1.0, abs(x0))]
    if not times:
        raise ConvergenceError(f"no return to the section within t=1e3 (s={s})")
    return float(times[0])


def potential_period_ode(model: PotentialModel, h: float, rtol: float = 1e-12, atol: float = 1e-12) -> float:
    """Period of u' = -v, v' = V'(u) at energy h from the ODE, starting at (u+, 0)."""
    up = model.u_of(model.solve_level(math.sqrt(h)))

    def rhs(t, y):
        u, v = y
        return [-v, model.derivs(model.point_from_u(u)).V1]

    def ret(t, y):
        return y[1]

    ret.direction = 1.0
    sol = solve_ivp(rhs, (0.0, 1e3), [up, 0.0], method="DOP853", rtol=rtol, atol=atol, events=ret)
    times = [t for t in sol.t_events[0] if t > 1e-8]
    if not times:
        raise ConvergenceError("no return within t=1e3")
    return float(times[0])
