"""Tolerances and run settings shared by the engine and the command line."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class Tolerances:
    quad: float = 1e-9  # absolute tolerance of momentum quadratures
    curve: float = 1e-12  # |Delta| target when solving for G(F)
    fit_decades: float = 4.0
    on_curve: float = 1e-6  # |D - G(F)| below which mu counts as on the curve
    guard: float = 1e-4  # half-width of the F = 3/2, F = 2, D = -1/2 bands
    n1_zero_factor: float = 10.0  # N1 is "zero" below this multiple of its error

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive, got {v}")


@dataclass(frozen=True)
class CliConfig:
    command: str
    D: float | None = None
    F: float | None = None
    window: tuple[float, float, float, float] | None = None  # D_lo, D_hi, F_lo, F_hi
    grid: int = 50
    tol: Tolerances = field(default_factory=Tolerances)
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.window is not None:
            d0, d1, f0, f1 = self.window
            if not (d0 < d1 and f0 < f1):
                raise ValueError("window must be well ordered: D_lo < D_hi, F_lo < F_hi")
        if self.grid < 0:
            raise ValueError("grid must be non-negative")

    def header(self) -> str:
        d = asdict(self)
        return "# config " + " ".join(f"{k}={v}" for k, v in _flatten(d))


def _flatten(d, prefix=""):
    for k, v in d.items():
        if isinstance(v, dict):
            yield from _flatten(v, prefix + k + ".")
        else:
            yield prefix + k, v


def worker_count() -> int:
    cap = os.environ.get("LOUD_CRIT_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n
