"""Command line front end: classify, scan, curve, delta, period, verify."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from contextlib import contextmanager
from dataclasses import asdict

import numpy as np

from .config import CliConfig, Tolerances
from .delta import delta, tabulate_curve
from .engine import classify, scan_lambda
from .errors import DomainError, LoudError
from .loud_core import Params
from .period import period_derivative, period_energy
from .potential import PotentialModel
from .verify import SUITES

EX_OK, EX_FAIL, EX_INTERNAL, EX_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _add_tols(p):
    t = Tolerances()
    p.add_argument("--tol-quad", type=float, default=t.quad)
    p.add_argument("--tol-curve", type=float, default=t.curve)
    p.add_argument("--tol-fit", type=float, default=t.fit_decades, help="fit window in decades")
    p.add_argument("--tol-on-curve", type=float, default=t.on_curve)
    p.add_argument("--tol-guard", type=float, default=t.guard)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="loudcrit", description="Criticality of the outer boundary of Loud's centers")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="verdict for one parameter")
    p.add_argument("-D", type=float, required=True)
    p.add_argument("-F", type=float, required=True)
    _add_tols(p)

    p = sub.add_parser("scan", help="classify a grid over a (D, F) window")
    p.add_argument("--window", type=float, nargs=4, metavar=("D_LO", "D_HI", "F_LO", "F_HI"), default=(-2.0, -0.5, 1.05, 2.45))
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--no-curve", action="store_true", help="do not append on-curve nodes")
    _add_tols(p)

    p = sub.add_parser("curve", help="tabulate D = G(F)")
    p.add_argument("F_lo", type=float)
    p.add_argument("F_hi", type=float)
    p.add_argument("n", type=int)
    _add_tols(p)

    p = sub.add_parser("delta", help="bifurcation coefficient at one parameter")
    p.add_argument("-D", type=float, required=True)
    p.add_argument("-F", type=float, required=True)
    _add_tols(p)

    p = sub.add_parser("period", help="table of h, T(h), T'(h)")
    p.add_argument("-D", type=float, required=True)
    p.add_argument("-F", type=float, required=True)
    p.add_argument("--grid", type=int, default=20)
    _add_tols(p)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("suite")
    _add_tols(p)
    return ap


def _config(args) -> CliConfig:
    tol = Tolerances(args.tol_quad, args.tol_curve, args.tol_fit, args.tol_on_curve, args.tol_guard)
    window = tuple(args.window) if getattr(args, "window", None) is not None else None
    return CliConfig(
        command=args.command,
        D=getattr(args, "D", None),
        F=getattr(args, "F", None),
        window=window,
        grid=getattr(args, "grid", 0) or 0,
        tol=tol,
        out=args.out,
        format=args.format,
    )


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(cfg: CliConfig, columns, rows):
    with _sink(cfg.out) as fh:
        if cfg.format == "csv":
            fh.write(cfg.header() + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_csv_cell(r.get(c)) for c in columns])
        else:
            fh.write(json.dumps({"config": asdict(cfg)}) + "\n")
            for r in rows:
                fh.write(json.dumps(r) + "\n")


def _csv_cell(v):
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return "" if v is None else v


VERDICT_COLUMNS = ["D", "F", "case", "xi", "bound", "lower_bound", "N1", "N1_err", "flags"]


def _verdict_row(v):
    r = v.record()
    if r["momenta"]:
        r["N1"], r["N1_err"] = r["momenta"][0]["value"], r["momenta"][0]["err"]
    r["D"], r["F"] = r["mu"]
    return r


def _rows_for_format(cfg, verdicts):
    if cfg.format == "json":
        return [v.record() for v in verdicts]
    return [_verdict_row(v) for v in verdicts]


def cmd_classify(cfg):
    v = classify(Params(cfg.D, cfg.F), cfg.tol)
    _emit(cfg, VERDICT_COLUMNS, _rows_for_format(cfg, [v]))
    return EX_OK


def cmd_scan(cfg, include_curve=True):
    verdicts = scan_lambda(cfg.window, cfg.grid, cfg.tol, include_curve=include_curve)
    _emit(cfg, VERDICT_COLUMNS, _rows_for_format(cfg, verdicts))
    return EX_OK


def cmd_curve(cfg, F_lo, F_hi, n):
    grid = np.linspace(F_lo, F_hi, n) if n > 0 else []
    rows = []
    for cp in tabulate_curve(grid, cfg.tol.curve):
        rows.append(
            {
                "F": cp.F,
                "G": cp.G,
                "residual": cp.residual,
                "bracket_lo": cp.bracket[0],
                "bracket_hi": cp.bracket[1],
                "low_confidence": int(cp.low_confidence),
                "error": cp.error or "",
            }
        )
    _emit(cfg, ["F", "G", "residual", "bracket_lo", "bracket_hi", "low_confidence", "error"], rows)
    return EX_OK


def cmd_delta(cfg):
    mu = Params(cfg.D, cfg.F)
    _emit(cfg, ["D", "F", "delta"], [{"D": cfg.D, "F": cfg.F, "delta": delta(mu)}])
    return EX_OK


def cmd_period(cfg):
    m = PotentialModel(Params(cfg.D, cfg.F))
    h0 = m.h0
    rows = []
    for g in np.geomspace(0.999, 1e-6, cfg.grid):
        gap = float(g * h0)
        h = h0 - gap
        ps = period_energy(m, h, gap)
        rows.append({"h": h, "T": ps.T, "dT": period_derivative(m, h, gap, "integral")})
    _emit(cfg, ["h", "T", "dT"], rows)
    return EX_OK


def cmd_verify(cfg, suite):
    if suite not in SUITES:
        sys.stderr.write(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}\n")
        return EX_USAGE
    checks = list(SUITES[suite]())
    rows = [{"check": c.name, "pass": c.passed, "detail": c.detail} for c in checks]
    _emit(cfg, ["check", "pass", "detail"], rows)
    return EX_OK if all(c.passed for c in checks) else EX_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
    except UsageError:
        return EX_USAGE
    except ValueError as exc:
        sys.stderr.write(f"loudcrit: error: {exc}\n")
        return EX_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "classify":
                return cmd_classify(cfg)
            if args.command == "scan":
                return cmd_scan(cfg, not args.no_curve)
            if args.command == "curve":
                return cmd_curve(cfg, args.F_lo, args.F_hi, args.n)
            if args.command == "delta":
                return cmd_delta(cfg)
            if args.command == "period":
                return cmd_period(cfg)
            return cmd_verify(cfg, args.suite)
    except DomainError as exc:
        sys.stderr.write(f"loudcrit: {type(exc).__name__}: {exc}\n")
        return EX_USAGE
    except LoudError as exc:
        sys.stderr.write(f"loudcrit: {type(exc).__name__}: {exc}\n")
        return EX_INTERNAL
    except Exception as exc:  # pragma: no cover - surfaced as internal error
        sys.stderr.write(f"loudcrit: internal error: {type(exc).__name__}: {exc}\n")
        return EX_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
