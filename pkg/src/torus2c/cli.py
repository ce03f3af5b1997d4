"""Command line entry point.

Each subcommand parses its flags, loads any function file, runs one
library operation, and writes a single CSV or JSON artifact. Exit code 0
means the artifact was written; 2 is a usage problem; 3 is a precondition
the library refused (the message explains which). Output is deterministic
for a fixed invocation: JSON keys are sorted, CSV floats use six
significant digits, and nothing embeds a timestamp.

The --threads flag (or TORUS2C_THREADS) is accepted and validated, but
every operation currently runs serially; results never depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .complexity import bound_formulas, complexity_report, write_report_csv
from .diophantine import cf_expand, convergents, golden_alpha, liouville_alpha
from .errors import PreconditionError, ResonanceExhausted
from .funcspace import load_function, save_function
from .order2 import build_counterexample, coboundary_coeffs, order2_verdict
from .probes import deviation_search, minimality_probe, qpair_witness, ergodic_average
from .skew import SkewProduct, orbit_arrays
from .torus import TorusPoint


def _alpha_spec(text: str):
    """Parse an alpha argument into its most faithful numeric form."""
    if text == "golden":
        return golden_alpha()
    if text.startswith("liouville:"):
        try:
            return liouville_alpha(int(text.split(":", 1)[1]))
        except (ValueError, PreconditionError) as e:
            raise argparse.ArgumentTypeError(f"bad liouville spec {text!r}: {e}")
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"cannot parse alpha {text!r}: {e}")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _system(args) -> SkewProduct:
    return SkewProduct(alpha=float(args.alpha), f=load_function(args.f))


def _run_cf(args) -> int:
    cf = cf_expand(args.alpha, args.depth)
    _write_json(args.out, {
        "a0": cf.a0,
        "partial_quotients": list(cf.partial_quotients),
        "truncated": cf.truncated,
        "convergents": [{"p": c.p, "q": c.q} for c in convergents(cf)],
    })
    return 0


def _run_build_f(args) -> int:
    f = build_counterexample(args.l, args.alpha, args.k_max, n_cap=args.n_cap)
    save_function(f, args.out)
    return 0


def _run_complexity(args) -> int:
    T = _system(args)
    reports = [complexity_report(T, n, eps, args.grid)
               for n in args.n for eps in args.eps]
    with open(args.out, "w") as fh:
        write_report_csv(reports, fh)
    return 0


def _run_bounds(args) -> int:
    f = load_function(args.f)
    lower, upper, c1, c2 = bound_formulas(f, args.n, args.eps)
    _write_json(args.out, {
        "n": args.n, "eps": args.eps,
        "bound_lower": lower, "bound_upper": upper,
        "c1": c1, "c2": c2,
    })
    return 0


def _run_coboundary(args) -> int:
    f = load_function(args.f)
    rep = coboundary_coeffs(f, args.alpha, args.n_max)
    _write_json(args.out, {
        "b_terms": [[n, b] for n, b in rep.b_terms],
        "partial_sums": [[n, s] for n, s in rep.partial_sums],
        "verdict": rep.verdict,
        "c": rep.c,
        "order2": order2_verdict(rep),
    })
    return 0


def _run_simulate(args) -> int:
    T = _system(args)
    xs, ys = orbit_arrays(T, args.x, args.y, args.steps)
    with open(args.out, "w") as fh:
        fh.write("i,x,y\n")
        for i in range(args.steps):
            fh.write(f"{i},{xs[i]:.6g},{ys[i]:.6g}\n")
    return 0


def _run_probe_minimality(args) -> int:
    T = _system(args)
    rep = minimality_probe(T, TorusPoint.of(args.x, args.y),
                           args.cells, args.horizon)
    _write_json(args.out, {
        "cells": rep.cells,
        "horizon": rep.horizon,
        "coverage_fraction": rep.coverage_fraction,
        "first_hit": {f"{i},{j}": t for (i, j), t in rep.first_hit.items()},
        "evidence_only": True,
    })
    return 0


def _run_probe_qpair(args) -> int:
    T = _system(args)
    w = qpair_witness(T, args.x, args.y1, args.y2, args.eps, args.delta,
                      args.horizon, args.grid, x_second=args.x2)
    _write_json(args.out, {
        "x": float(w.x), "y1": float(w.y1), "y2": float(w.y2),
        "eps": w.eps,
        "x_prime": float(w.x_prime), "x_zero": float(w.x_zero),
        "n_witness": w.n_witness, "achieved": w.achieved,
        "witness_found": w.achieved < w.eps,
        "evidence_only": True,
    })
    return 0


def _run_ergodic(args) -> int:
    f = load_function(args.f)
    alpha = float(args.alpha)
    with open(args.out, "w") as fh:
        fh.write("n,deviation\n")
        for n in args.n_list:
            dev = ergodic_average(f.periodic_part, alpha, args.x, n)
            fh.write(f"{n},{dev:.6g}\n")
    return 0


def _run_deviation(args) -> int:
    f = load_function(args.f)
    best_upper, best_lower = deviation_search(f, float(args.alpha),
                                              args.horizon, args.grid)

    def enc(rep):
        return {"x_star": float(rep.x_star), "horizon": rep.horizon,
                "sup_dev": rep.sup_dev, "inf_dev": rep.inf_dev,
                "mean": rep.mean}

    _write_json(args.out, {
        "best_upper": enc(best_upper),
        "best_lower": enc(best_lower),
        "achieved_upper": best_upper.sup_dev <= 2,
        "achieved_lower": best_lower.inf_dev >= -2,
        "evidence_only": True,
    })
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torus2c",
        description="orbit complexity and cohomology tools for skew "
                    "products over circle rotations")
    try:
        env_threads = int(os.environ.get("TORUS2C_THREADS", "0"))
    except ValueError:
        env_threads = 0
    parser.add_argument(
        "--threads", type=_positive,
        default=env_threads if env_threads > 0 else os.cpu_count(),
        help="advisory worker count; all operations are serial today")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def cmd(name, run, **flags):
        p = sub.add_parser(name)
        for flag, kw in flags.items():
            p.add_argument("--" + flag.replace("_", "-"), **kw)
        p.set_defaults(run=run)
        return p

    alpha = {"type": _alpha_spec, "required": True}
    out = {"required": True}
    fpath = {"dest": "f", "required": True}

    cmd("cf", _run_cf, alpha=alpha, depth={"type": _positive, "required": True},
        out=out)
    cmd("build-f", _run_build_f, l={"type": int, "required": True},
        alpha=alpha, k_max={"type": _positive, "required": True},
        n_cap={"type": int, "default": 10**45}, out=out)
    cmd("complexity", _run_complexity, f=fpath, alpha=alpha,
        n={"type": _int_list, "required": True},
        eps={"type": _float_list, "required": True},
        grid={"type": _positive, "default": 1024}, out=out)
    cmd("bounds", _run_bounds, f=fpath,
        n={"type": int, "required": True},
        eps={"type": float, "required": True}, out=out)
    cmd("coboundary", _run_coboundary, f=fpath, alpha=alpha,
        n_max={"type": _positive, "required": True}, out=out)
    cmd("simulate", _run_simulate, f=fpath, alpha=alpha,
        x={"type": float, "required": True}, y={"type": float, "required": True},
        steps={"type": _positive, "required": True}, out=out)
    cmd("probe-minimality", _run_probe_minimality, f=fpath, alpha=alpha,
        cells={"type": _positive, "required": True},
        horizon={"type": _positive, "required": True},
        x={"type": float, "default": 0.0}, y={"type": float, "default": 0.0},
        out=out)
    cmd("probe-qpair", _run_probe_qpair, f=fpath, alpha=alpha,
        x={"type": float, "required": True},
        y1={"type": float, "required": True},
        y2={"type": float, "required": True},
        eps={"type": float, "required": True},
        delta={"type": float, "required": True},
        horizon={"type": _positive, "required": True},
        grid={"type": _positive, "default": 64},
        x2={"type": float, "default": None}, out=out)
    cmd("ergodic", _run_ergodic, f=fpath, alpha=alpha,
        x={"type": float, "required": True},
        n_list={"type": _int_list, "required": True}, out=out)
    cmd("deviation", _run_deviation, f=fpath, alpha=alpha,
        horizon={"type": _positive, "required": True},
        grid={"type": _positive, "required": True}, out=out)
    return parser


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.run(args)
    except (PreconditionError, ResonanceExhausted) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
