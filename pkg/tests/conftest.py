import math
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from loudcrit.loud_core import Params  # noqa: E402
from loudcrit.potential import PotentialModel  # noqa: E402

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def lambda_params(draw, F_lo=1.05, F_hi=2.45, margin=0.02):
    """Points of Lambda = {F > 1, D < -1/2, D + F > 0}, away from its edges."""
    F = draw(st.floats(F_lo, F_hi))
    t = draw(st.floats(margin, 1.0 - margin))
    return Params(-F + t * (F - 0.5), F)


def lambda_grid(n, F_range=(1.05, 2.45), margin=0.02):
    import numpy as np

    out = []
    for F in np.linspace(*F_range, n):
        for t in np.linspace(margin, 1 - margin, n):
            out.append(Params(float(-F + t * (F - 0.5)), float(F)))
    return out


@pytest.fixture(scope="session")
def mu_ref():
    return Params(-0.6, 1.3)


@pytest.fixture(scope="session")
def model_ref(mu_ref):
    return PotentialModel(mu_ref)


# criterion number -> PASS/FAIL line, filled by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


__all__ = ["ACCEPTANCE", "lambda_params", "lambda_grid", "rel", "math"]
