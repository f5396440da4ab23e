"""Criticality of the outer boundary of the period annulus of Loud's centers."""
from .delta import curve_g, delta, tabulate_curve
from .engine import CriticalityVerdict, classify, scan_lambda
from .loud_core import Params, conic_data, in_lambda
from .potential import PotentialModel

__all__ = [
    "CriticalityVerdict",
    "Params",
    "PotentialModel",
    "classify",
    "conic_data",
    "curve_g",
    "delta",
    "in_lambda",
    "scan_lambda",
    "tabulate_curve",
]
