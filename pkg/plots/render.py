#!/usr/bin/env python3
"""Turn torus2c result files into figures.

Five kinds, one input file each:

  growth           complexity CSV: separated/spanning counts against n
  bounds-envelope  complexity CSV: the c1*n .. c2*n band with the
                   greedy count inside it
  coboundary       coboundary JSON: partial sums of 2|b_n|^2 against
                   the frequency cutoff
  coverage         minimality probe JSON: first-visit heatmap
  orbit            simulate CSV: the visited points of one orbit

Display only; nothing is recomputed here. Output is deterministic:
fixed style, Agg backend, no date stamp in the PNG metadata.
"""

import argparse
import csv
import json
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (7.0, 4.5)
DPI = 160

GROWTH_COLUMNS = ("n", "eps", "sep_greedy", "sep_construct",
                  "span_construct", "bound_lower", "bound_upper")


class SchemaError(Exception):
    """Input file exists but does not match the requested kind."""


def read_rows(path, required):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or ()
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_doc(path, required):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    missing = [k for k in required if k not in doc]
    if missing:
        raise SchemaError(f"{path}: missing keys {', '.join(missing)}")
    return doc


def by_eps(rows):
    groups = {}
    for row in rows:
        groups.setdefault(row["eps"], []).append(row)
    return sorted(groups.items(), key=lambda kv: float(kv[0]))


def column(rows, name):
    try:
        return [float(r[name]) for r in rows]
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"column {name}: {exc}") from exc


def render_growth(path, ax):
    rows = read_rows(path, GROWTH_COLUMNS)
    for eps, group in by_eps(rows):
        ns = column(group, "n")
        ax.plot(ns, column(group, "sep_greedy"), "o-",
                label=f"greedy separated, eps={eps}")
        ax.plot(ns, column(group, "span_construct"), "s--",
                label=f"spanning construction, eps={eps}")
        ax.plot(ns, column(group, "bound_lower"), ":",
                label=f"c1*n, eps={eps}")
        ax.plot(ns, column(group, "bound_upper"), ":",
                label=f"c2*n, eps={eps}")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("set size")
    ax.set_title("Separated and spanning counts against n")
    ax.legend(fontsize=7)


def render_envelope(path, ax):
    rows = read_rows(path, GROWTH_COLUMNS)
    for eps, group in by_eps(rows):
        ns = column(group, "n")
        ax.fill_between(ns, column(group, "bound_lower"),
                        column(group, "bound_upper"), alpha=0.25,
                        label=f"c1*n .. c2*n, eps={eps}")
        ax.plot(ns, column(group, "sep_greedy"), "o-",
                label=f"greedy separated, eps={eps}")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("set size")
    ax.set_title("Greedy count inside the linear envelope")
    ax.legend(fontsize=7)


def render_coboundary(path, ax):
    doc = read_doc(path, ("partial_sums", "verdict"))
    sums = doc["partial_sums"]
    if not sums or not all(len(p) == 2 for p in sums):
        raise SchemaError(f"{path}: partial_sums must be (N, sum) pairs")
    ns = [p[0] for p in sums]
    vals = [p[1] for p in sums]
    ax.plot(ns, vals, "o", color="tab:red")
    ax.step(ns, vals, where="post", color="tab:red")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("frequency cutoff N")
    ax.set_ylabel("sum of 2|b_n|^2, |n| <= N")
    ax.set_title(f"Transfer coefficient mass ({doc['verdict']})")


def render_coverage(path, ax):
    doc = read_doc(path, ("cells", "coverage_fraction", "first_hit"))
    cells = int(doc["cells"])
    if cells < 1:
        raise SchemaError(f"{path}: cells must be positive")
    grid = np.full((cells, cells), np.nan)
    for key, step in doc["first_hit"].items():
        try:
            i, j = (int(v) for v in key.split(","))
            grid[j, i] = float(step)
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"{path}: bad cell key {key!r}") from exc
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("0.85")
    im = ax.imshow(grid, origin="lower", extent=(0, 1, 0, 1), cmap=cmap)
    ax.figure.colorbar(im, ax=ax, label="first visit step")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    frac = float(doc["coverage_fraction"])
    ax.set_title(f"Orbit coverage on a {cells} x {cells} grid "
                 f"(fraction {frac:g})")


def render_orbit(path, ax):
    rows = read_rows(path, ("i", "x", "y"))
    ax.scatter(column(rows, "x"), column(rows, "y"), s=2, color="tab:blue")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"Orbit, {len(rows)} points")


KINDS = {
    "growth": render_growth,
    "bounds-envelope": render_envelope,
    "coboundary": render_coboundary,
    "coverage": render_coverage,
    "orbit": render_orbit,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="render.py", description="Render torus2c artifacts to figures.")
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument("--in", dest="src", required=True,
                        help="input CSV or JSON file")
    parser.add_argument("--out", dest="out", required=True,
                        help="output image file")
    args = parser.parse_args(argv)

    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    try:
        KINDS[args.kind](args.src, ax)
        # no Date chunk, so rerenders of the same input are identical
        fig.savefig(args.out, metadata={"Date": None})
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
