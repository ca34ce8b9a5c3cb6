"""CLI subcommands, run in process."""

import json
import math

import pytest

from roughlap.cli import main

TWO_PI = 2 * math.pi


def test_constants_table(capsys):
    assert main(["constants", "--n", "2", "--lambda-grid", "0.5", "1.0"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0].startswith("n lambda")
    assert len(lines) == 3
    # full double precision: sine integral for n=2 prints as 2.0...
    assert "2.0" in lines[1]


def test_bound_reference_value(capsys):
    assert main(["bound", "--dim", "4", "--kappa", "0", "--diameter", "1",
                 "--riem2p", "0", "--p", "4"]) == 0
    out = capsys.readouterr().out
    rhs = float(out.splitlines()[2].split()[1])
    assert rhs == pytest.approx(1.0 / (4.0 * math.e), abs=1e-12)
    assert "active branch1" in out


def test_bound_corollary_variant(capsys):
    assert main(["bound", "--corollary-variant"]) == 0
    b2 = float(capsys.readouterr().out.splitlines()[1].split()[1])
    assert b2 == pytest.approx(4.0 ** (-1.0 / 8.0) * math.exp(-1.0 / 8.0), rel=1e-12)


def test_spectrum_torus(capsys, tmp_path):
    csv = tmp_path / "eig.csv"
    assert main(["spectrum", "--manifold", "flat_torus", "--nx", "12", "--ny", "12",
                 "--k", "4", "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert "flat_torus" in out
    values = [float(ln.split()[0]) for ln in out.splitlines()
              if ln and not ln.startswith("#")]
    assert abs(values[0]) < 1e-9
    assert csv.read_text().startswith("eigenvalue,residual")


def test_spectrum_sphere_function(capsys):
    assert main(["spectrum", "--manifold", "icosphere", "--subdiv", "2",
                 "--operator", "function", "--k", "4"]) == 0
    out = capsys.readouterr().out
    values = [float(ln.split()[0]) for ln in out.splitlines()
              if ln and not ln.startswith("#")]
    assert values[1] == pytest.approx(2.0, rel=0.02)


def test_verify_and_report(capsys, tmp_path):
    spec = {
        "seed": 0,
        "experiments": [{"label": "g",
                         "checks": [{"name": "moser_product_grid",
                                     "t_grid": [1.0], "gamma_grid": [2.0]}]}],
    }
    spec_path = tmp_path / "suite.json"
    spec_path.write_text(json.dumps(spec))
    out_path = tmp_path / "out.json"
    assert main(["verify", "--spec", str(spec_path), "--out", str(out_path)]) == 0
    printed = capsys.readouterr().out
    assert "PASS" in printed and "g:moser_product_grid" in printed
    report = json.loads(out_path.read_text())
    assert report["schema_version"] == 1
    assert report["outcomes"][0]["status"] == "pass"

    md = tmp_path / "render.md"
    assert main(["report", "--input", str(out_path),
                 "--format", "markdown", "--out", str(md)]) == 0
    assert "| g:moser_product_grid | pass |" in md.read_text()


def test_verify_spec_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"label": "x", "checks": ["nope"]}))
    assert main(["verify", "--spec", str(bad)]) == 2
    assert "spec error" in capsys.readouterr().err
