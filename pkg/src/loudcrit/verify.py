"""Self-checks run by ``loudcrit verify <suite>``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import catalog_functions, catalog_n0, estimate_quantifier, left_fit_innermost
from .chebyshev import momentum, recursion_coefficient
from .delta import curve_g, delta
from .engine import classify, lambda_grid
from .errors import DivergenceError, LoudError
from .loud_core import Params
from .period import loud_period, period_energy, period_section
from .potential import PotentialModel, phi, phi_inv


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _lambda_nodes(n, F_range=(1.05, 2.45)):
    out = []
    for F in np.linspace(*F_range, n):
        for t in np.linspace(0.02, 0.98, n):
            # D across (-F, -1/2)
            out.append(Params(float(-F + t * (F - 0.5)), float(F)))
    return out


def suite_identities(n: int = 30):
    worst = [0.0, 0.0, 0.0]
    worst_phi = 0.0
    for mu in _lambda_nodes(n):
        m = PotentialModel(mu)
        pt = m.point_from_u(0.0)
        d = m.derivs(pt)
        worst = [max(worst[0], abs(d.V)), max(worst[1], abs(d.V1)), max(worst[2], abs(d.V2 - 1.0))]
        for z in (0.3, 1.0, 2.5):
            worst_phi = max(worst_phi, abs(phi(phi_inv(phi(z, mu.F), mu.F), mu.F) - phi(z, mu.F)))
    yield Check("V(0)=0", worst[0] < 1e-12, f"max |V(0)| = {worst[0]:.3g}")
    yield Check("V'(0)=0", worst[1] < 1e-12, f"max |V'(0)| = {worst[1]:.3g}")
    yield Check("V''(0)=1", worst[2] < 1e-12, f"max |V''(0)-1| = {worst[2]:.3g}")
    yield Check("phi o phi^-1 = id", worst_phi < 1e-12, f"max error {worst_phi:.3g}")


def suite_quantifiers(samples=((-0.6, 1.3), (-1.0, 1.7))):
    for D, F in samples:
        mu = Params(D, F)
        m = PotentialModel(mu)
        cat = catalog_n0(mu)
        fns = catalog_functions(m)
        inner = left_fit_innermost(F)
        for key, exp_, lim, side in (
            ("depth_l", cat.beta_l, cat.b_l, "l"),
            ("depth_r", cat.beta_r, cat.b_r, "r"),
            ("quot_l", cat.alpha_l, cat.a_l, "l"),
            ("quot_r", cat.alpha_r, cat.a_r, "r"),
        ):
            try:
                if side == "l":
                    q = estimate_quantifier(fns[key], 0.0, innermost=inner, distance=True, drift_tol=1e-2)
                else:
                    q = estimate_quantifier(fns[key], 0.0, distance=True, drift_tol=1e-2)
                ok = abs(q.alpha - exp_) <= 0.02 * max(abs(exp_), 1e-12) and abs(q.limit / lim - 1) < 0.05
                yield Check(f"{key} at {mu}", ok, f"alpha {q.alpha:.6g} vs {exp_:.6g}, limit {q.limit:.6g} vs {lim:.6g}")
            except LoudError as exc:
                yield Check(f"{key} at {mu}", False, str(exc))


def suite_momenta():
    n1 = momentum(1, lambda x: 1.0)
    yield Check("N1[1] = pi/2", abs(n1.value - math.pi / 2) < 1e-9, f"{n1.value!r}")
    try:
        momentum(2, lambda x: 1.0, exponent=0.0)
        yield Check("N2[1] divergent", False, "no divergence reported")
    except DivergenceError as exc:
        yield Check("N2[1] divergent", True, str(exc))
    c = recursion_coefficient([-1.0], 1)
    yield Check("nu=-1 kills the l=1 coefficient", c == 0.0, f"coefficient {c}")


def suite_delta(Fs=(1.35, 1.40, 1.45)):
    for F in Fs:
        try:
            cp = curve_g(F)
            lo, hi = delta(Params(cp.G - 1e-3, F)), delta(Params(cp.G + 1e-3, F))
            ok = -F < cp.G < -0.5 and cp.residual < 1e-10 and lo * hi < 0
            yield Check(f"curve at F={F}", ok, f"G={cp.G:.12g} residual={cp.residual:.3g}")
        except LoudError as exc:
            yield Check(f"curve at F={F}", False, str(exc))


def suite_period(D: float = -0.6, F: float = 1.3):
    m = PotentialModel(Params(D, F))
    t = period_energy(m, 1e-8).T
    yield Check("T(h) -> 2 pi", abs(t - 2 * math.pi) < 1e-4, f"T(1e-8) = {t!r}")
    for s in (0.05, 0.1, 0.2):
        p, q = period_section(m, s), loud_period(m.mu, s)
        yield Check(f"conjugacy s={s}", abs(p / q - 1) < 1e-6, f"P={p!r} Loud={q!r}")


def suite_classify_grid(n: int = 8):
    nodes = lambda_grid((-2.0, -0.5, 1.05, 2.45), n, include_curve=False)
    bad = []
    for mu in nodes:
        v = classify(mu)
        if v.case_taken.startswith("Inconclusive(OUT_OF_LAMBDA)"):
            continue
        if not v.regular:
            bad.append(f"{mu}: {v.case_taken}")
    yield Check(f"classify {n}x{n} grid", not bad, "; ".join(bad) or "all regular")


SUITES = {
    "identities": suite_identities,
    "quantifiers": suite_quantifiers,
    "momenta": suite_momenta,
    "delta": suite_delta,
    "period": suite_period,
    "classify-grid": suite_classify_grid,
}
