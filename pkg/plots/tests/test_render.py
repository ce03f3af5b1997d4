import json
import subprocess
import sys
from pathlib import Path

import pytest

RENDER = Path(__file__).resolve().parents[1] / "render.py"

GROWTH_CSV = (
    "n,eps,sep_greedy,sep_construct,span_construct,"
    "bound_lower,bound_upper,eta_eps,variation\n"
    "25,0.1,2082,60,10106,20.8335,100000,0.0998535,1\n"
    "50,0.1,4381,121,19654,41.667,200000,0.0998535,1\n"
    "100,0.1,9172,242,38719,83.334,400000,0.0998535,1\n")


def render(kind, src, out):
    return subprocess.run(
        [sys.executable, str(RENDER), "--kind", kind,
         "--in", str(src), "--out", str(out)],
        capture_output=True, text=True)


def render_twice(kind, src, tmp_path):
    """Render the same input twice and return both byte strings."""
    blobs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{kind}_{tag}.png"
        r = render(kind, src, out)
        assert r.returncode == 0, r.stderr
        blobs.append(out.read_bytes())
    return blobs


@pytest.fixture()
def growth_csv(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text(GROWTH_CSV)
    return p


def test_growth_smoke(tmp_path, growth_csv):
    first, second = render_twice("growth", growth_csv, tmp_path)
    assert len(first) > 0
    assert first == second


def test_envelope_smoke(tmp_path, growth_csv):
    first, second = render_twice("bounds-envelope", growth_csv, tmp_path)
    assert len(first) > 0
    assert first == second


def test_coboundary_smoke(tmp_path):
    src = tmp_path / "c.json"
    src.write_text(json.dumps({
        "b_terms": [[64, 1.0], [16777216, 1.0]],
        "partial_sums": [[64, 2.0], [16777216, 4.0]],
        "verdict": "diverges", "c": 0.0}))
    first, second = render_twice("coboundary", src, tmp_path)
    assert len(first) > 0
    assert first == second


def test_coverage_smoke(tmp_path):
    hits = {f"{i},{j}": 4 * i + j for i in range(4) for j in range(4)}
    src = tmp_path / "m.json"
    src.write_text(json.dumps({
        "cells": 4, "horizon": 100, "coverage_fraction": 1.0,
        "evidence_only": True, "first_hit": hits}))
    first, second = render_twice("coverage", src, tmp_path)
    assert len(first) > 0
    assert first == second


def test_coverage_with_unvisited_cells(tmp_path):
    src = tmp_path / "m.json"
    src.write_text(json.dumps({
        "cells": 3, "horizon": 10, "coverage_fraction": 2 / 9,
        "evidence_only": True, "first_hit": {"0,0": 0, "2,1": 7}}))
    out = tmp_path / "m.png"
    r = render("coverage", src, out)
    assert r.returncode == 0, r.stderr
    assert out.stat().st_size > 0


def test_orbit_smoke(tmp_path):
    src = tmp_path / "s.csv"
    src.write_text("i,x,y\n0,0.1,0.2\n1,0.718034,0.3\n2,0.336068,0.018034\n")
    first, second = render_twice("orbit", src, tmp_path)
    assert len(first) > 0
    assert first == second


def test_schema_mismatch_fails_with_message(tmp_path, growth_csv):
    r = render("coboundary", growth_csv, tmp_path / "x.png")
    assert r.returncode == 1
    assert "error:" in r.stderr
    r = render("growth", growth_csv.with_suffix(".missing"),
               tmp_path / "y.png")
    assert r.returncode == 1
    assert "error:" in r.stderr


def test_bad_cell_key_fails(tmp_path):
    src = tmp_path / "m.json"
    src.write_text(json.dumps({
        "cells": 2, "horizon": 5, "coverage_fraction": 0.25,
        "first_hit": {"nonsense": 0}}))
    r = render("coverage", src, tmp_path / "m.png")
    assert r.returncode == 1
    assert "nonsense" in r.stderr


def test_unknown_kind_is_usage_error(tmp_path, growth_csv):
    r = render("pie", growth_csv, tmp_path / "x.png")
    assert r.returncode == 2
