from __future__ import annotations

import json
import math

import pytest

from torusgreen.cli import main, parse_complex, parse_radii


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "text, z",
    [("0.5+0.9i", 0.5 + 0.9j), ("0+1i", 1j), ("i", 1j), ("-0.5+0.9i", -0.5 + 0.9j), ("2", 2), ("1-i", 1 - 1j), ("1e-3+2.5e1i", 0.001 + 25j)],
)
def test_parse_complex(text, z):
    assert parse_complex(text) == z


def test_parse_radii():
    assert parse_radii("25:2:3") == [25.0, 50.0, 100.0]
    assert parse_radii("1,5.5") == [1.0, 5.5]


def test_critical_points_square_torus(capsys, tmp_path):
    out = tmp_path / "out.json"
    code, _, _ = run(capsys, "critical-points", "--tau", "0+1i", "--json", str(out))
    assert code == 0
    d = json.loads(out.read_text())
    assert d["total"] == 3 and d["n_plus"] - d["n_minus"] == -1


def test_region_scan_line_count(capsys, tmp_path):
    out = tmp_path / "m.csv"
    code, stdout, _ = run(
        capsys, "region", "scan", "--nx", "10", "--ny", "10", "--im-min", "0.5", "--im-max", "1.5",
        "--re-min=-0.5", "--re-max", "0.5", "--out", str(out),
    )
    assert code == 0
    assert len(out.read_text().splitlines()) == 101
    assert json.loads(stdout)["evaluated"] == 100


def test_negative_imaginary_part_is_a_usage_error(capsys):
    code, _, err = run(capsys, "critical-points", "--tau", "0-1i")
    assert code == 2
    assert "Im(tau) must be positive" in err
    assert "--tau" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["critical-points"],
        ["orbit", "--tau", "0.5+1.2i", "--z0", "x+yi"],
        ["region", "scan", "--nx", "0"],
        ["region", "scan", "--re-min", "1", "--re-max", "0"],
        ["wv", "analyze", "--series", "bogus"],
        ["wv", "analyze", "--eps", "0.7"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_computation_error_json(capsys):
    code, out, err = run(capsys, "metric", "--tau", "0+1i")
    assert code == 1 and out == ""
    d = json.loads(err)
    assert d["error"] == "no_nontrivial_solution" and "message" in d


def test_orbit_pole_is_reported_in_the_summary(capsys, tmp_path):
    out = tmp_path / "o.csv"
    code, stdout, _ = run(capsys, "orbit", "--tau", "0.5+1.2i", "--z0", "0", "--out", str(out))
    assert code == 0 and json.loads(stdout)["status"] == "pole_hit"


def test_orbit_csv(capsys, tmp_path):
    out = tmp_path / "o.csv"
    code, stdout, _ = run(capsys, "orbit", "--tau", "0+1i", "--z0", "0.3+0.2i", "--max-iter", "500", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "step,re,im"
    assert lines[1] == "0,0.29999999999999999,0.20000000000000001"
    summary = json.loads(stdout)
    assert summary["status"] == "converged_to_fixed_point"
    assert math.hypot(summary["limit"][0] - 0.5, summary["limit"][1] - 0.5) < 1e-9


def test_lattice_and_weierstrass(capsys):
    code, out, _ = run(capsys, "lattice", "--tau", "i")
    d = json.loads(out)
    assert code == 0 and set(d) == {"tau", "eta1", "eta2", "e", "g2", "g3", "area"}
    assert d["eta1"][0] == pytest.approx(math.pi / 2, rel=1e-13)
    code, out, _ = run(capsys, "weierstrass", "--tau", "i", "--z", "0.5")
    assert code == 0 and abs(json.loads(out)["p_prime"][0]) < 1e-10


def test_metric_summary(capsys, tmp_path):
    js, csv_path = tmp_path / "s.json", tmp_path / "u.csv"
    code, _, _ = run(capsys, "metric", "--tau", "0.5+1.2i", "--nx", "6", "--ny", "5", "--out", str(csv_path), "--json", str(js))
    assert code == 0
    d = json.loads(js.read_text())
    assert {"a", "lambda1", "lambda2", "cone_angle", "max_pde_residual"} <= set(d)
    assert math.hypot(*d["lambda1"]) == pytest.approx(1.0, abs=1e-8)
    assert len(csv_path.read_text().splitlines()) == 31


def test_wv_analyze_columns(capsys, tmp_path):
    out = tmp_path / "w.csv"
    code, _, _ = run(capsys, "wv", "analyze", "--series", "polynomial(3)", "--radii", "1,5", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    head = lines[0].split(",")
    assert head[:9] == ["r", "mu", "n", "M", "zr_re", "zr_im", "a", "disk_radius", "approx_error"]
    assert len(lines) == 3
    row = dict(zip(head, lines[2].split(",")))
    assert row["n"] == "3" and float(row["mu"]) == pytest.approx(125.0)


def test_wv_analyze_file_series(capsys, tmp_path):
    coeffs = tmp_path / "c.txt"
    coeffs.write_text("0 1 0\n1 1 0\n")
    code, out, _ = run(capsys, "wv", "analyze", "--series", f"file:{coeffs}", "--radii", "2")
    assert code == 0 and len(out.splitlines()) == 2
    # declared as a truncated series, two terms cannot support r = 2
    code, _, err = run(capsys, "wv", "analyze", "--series", f"file:{coeffs}", "--radii", "2", "--truncated")
    assert code == 1 and json.loads(err)["error"] == "truncation_insufficient"


def test_wv_escape(capsys):
    code, out, _ = run(capsys, "wv", "escape", "--map", "square", "--z0", "2", "--out", "-")
    assert code == 0 and len(out.splitlines()) == 1 + 7


def test_check_rs(capsys):
    code, out, _ = run(capsys, "--seed", "3", "check-rs", "--scale", "3", "--R", "3")
    d = json.loads(out)
    assert code == 0 and d["violations"] == 0 and d["qualifying"] == 50


def test_outputs_are_deterministic(capsys, tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / f"{k}.csv"
        svg = tmp_path / f"{k}.svg"
        assert run(capsys, "--threads", str(1 + 3 * k), "region", "scan", "--nx", "12", "--ny", "9", "--out", str(out), "--svg", str(svg))[0] == 0
        texts.append((out.read_bytes(), svg.read_bytes()))
    assert texts[0] == texts[1]
