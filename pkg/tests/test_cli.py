"""Command-line behavior: reports, determinism, exit codes, SVG output."""

import json
import math
import re

import pytest

from morsecover.cli import main
from morsecover.config import load_measure, load_region, parse_config
from morsecover.errors import InputError
from morsecover.geometry import Space


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_pack_exact_bracket(capsys, tmp_path):
    out_path = tmp_path / "pack.txt"
    rc, out, _ = run_cli(capsys, "pack", "--d", "1", "--container", "2",
                         "--mindist", "1", "--anchored", "--out", str(out_path))
    assert rc == 0
    assert "lower: 5" in out and "upper: 5" in out
    assert out_path.read_text() == out


def test_integrate_builtin_square(capsys):
    rc, out, _ = run_cli(capsys, "integrate", "--builtin", "x2",
                         "--eps", "1e-3")
    assert rc == 0
    value = float(re.search(r"value: (\S+)", out).group(1))
    assert 0.33233 <= value <= 0.33433


def test_pv_demo_limit(capsys):
    rc, out, _ = run_cli(capsys, "pv-demo", "--n", "10000")
    assert rc == 0
    row = out.strip().splitlines()[-1].split()
    assert abs(float(row[2]) - (-0.6931471806)) < 1e-3


def test_pv_demo_halvings_growth(capsys):
    rc, out, _ = run_cli(capsys, "pv-demo", "--halvings", "10",
                         "--start-radius", "0.5")
    assert rc == 0
    rows = [line.split() for line in out.strip().splitlines()[1:]]
    abs_sums = [float(r[3]) for r in rows]
    assert len(abs_sums) == 11
    assert all(b > a for a, b in zip(abs_sums, abs_sums[1:]))
    assert abs_sums[-1] > 10.0 * abs_sums[0]


def test_cover_svg_and_family_colors(capsys, tmp_path):
    svg_path = tmp_path / "cover.svg"
    rc, out, _ = run_cli(capsys, "cover", "--n", "40", "--seed", "7",
                         "--svg", str(svg_path))
    assert rc == 0
    m = int(re.search(r"families: (\d+)", out).group(1))
    svg = svg_path.read_text()
    fills = set(re.findall(r'fill="(#[0-9a-f]{6})"', svg)) - {"#000000"}
    assert len(fills) <= m


def test_cover_reports_are_deterministic(capsys, tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    run_cli(capsys, "cover", "--n", "60", "--seed", "42", "--out", str(a))
    run_cli(capsys, "cover", "--n", "60", "--seed", "42", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_cover_needs_seed(capsys):
    rc, _, err = run_cli(capsys, "cover", "--n", "10")
    assert rc == 2
    assert "seed" in err


def test_validate_shapes(capsys, tmp_path):
    shapes = {
        "space": {"dim": 1, "norm": "l2"},
        "shapes": [
            {"kind": "closed_ball", "r": 1.0, "lambda": 1.0,
             "payload": {"center": [0.0], "radius": 1.0}},
            {"kind": "open_ball", "tag": [1.0 / 3.0], "lambda": 2.0,
             "payload": {"center": [0.0], "radius": 1.0}},
        ],
    }
    path = tmp_path / "shapes.json"
    path.write_text(json.dumps(shapes))
    rc, out, _ = run_cli(capsys, "validate", "--shapes", str(path))
    assert rc == 0
    assert "min-lambda 1 valid" in out
    assert "min-lambda 2 valid" in out


def test_validate_satellite_verdict(capsys, tmp_path):
    shapes = {
        "space": {"dim": 1, "norm": "l2"},
        "shapes": [
            {"kind": "closed_ball", "r": 1.0, "lambda": 1.0,
             "payload": {"center": [1.2], "radius": 1.0}},
            {"kind": "closed_ball", "r": 0.5, "lambda": 1.0,
             "payload": {"center": [0.0], "radius": 0.5}},
        ],
    }
    path = tmp_path / "sat.json"
    path.write_text(json.dumps(shapes))
    rc, out, _ = run_cli(capsys, "validate", "--shapes", str(path),
                         "--satellite", "--tau", "1.2")
    assert rc == 0
    assert "satellite configuration (tau 1.2): yes" in out


def test_malformed_config_exits_two(capsys, tmp_path):
    cfg = tmp_path / "bad.txt"
    cfg.write_text("space:\n  dim: not-a-number\n")
    rc, _, err = run_cli(capsys, "integrate", "--config", str(cfg),
                         "--builtin", "x2")
    assert rc == 2
    assert "bad.txt:2" in err


def test_missing_shape_file_exits_two(capsys):
    rc, _, err = run_cli(capsys, "validate", "--shapes", "/nonexistent.json")
    assert rc == 2


def test_integrate_with_config_files(capsys, tmp_path):
    measure = tmp_path / "measure.txt"
    measure.write_text("atom: 0.0 1.0\ndensity: 0.0 1.0 1.0\n")
    region = tmp_path / "region.txt"
    region.write_text("box: 0.0 1.0\n")
    cfg = tmp_path / "run.txt"
    cfg.write_text(
        "space:\n  dim: 1\n  norm: l2\n"
        f"measure: {measure}\n"
        f"region: {region}\n"
        "integrand:\n  builtin: x\n"
        "eps: 1e-3\nseed: 3\n")
    rc, out, _ = run_cli(capsys, "integrate", "--config", str(cfg))
    assert rc == 0
    value = float(re.search(r"value: (\S+)", out).group(1))
    # atom at 0 with f(0) = 0 plus the linear density part
    assert value == pytest.approx(0.5, abs=2e-3)


def test_twelve_significant_digits(capsys):
    rc, out, _ = run_cli(capsys, "pack", "--d", "2", "--norm", "linf",
                         "--container", "2", "--mindist", "1", "--anchored")
    assert rc == 0
    assert "container: 2\n" in out  # %.12g renders integers bare


# ---------------------------------------------------------------------------
# config parsing units
# ---------------------------------------------------------------------------


def test_parse_config_sections():
    node = parse_config("a:\n  b: 1\n  c:\n    d: x\ne: 2\n", "t")
    assert node.children["a"].get("b") == "1"
    assert node.children["a"].children["c"].get("d") == "x"
    assert node.get("e") == "2"


def test_parse_config_bad_line():
    with pytest.raises(InputError, match="t:2"):
        parse_config("a: 1\nnot a key value\n", "t")


def test_load_measure_and_region(tmp_path):
    mf = tmp_path / "m.txt"
    mf.write_text("atom: 0.5 2.0\ndensity: 0.0 1.0 3.0\n")
    mu = load_measure(str(mf), Space(1, "l2"))
    assert mu.atoms == (((0.5,), 2.0),)
    assert mu.pieces[0][1] == 3.0
    rf = tmp_path / "r.txt"
    rf.write_text("box: 0.0 1.0\nminus-ball: 0.5 0.1\n")
    region = load_region(str(rf), Space(1, "l2"))
    assert len(region.positive) == 1 and len(region.negative) == 1
    with pytest.raises(InputError, match="m2.txt:1"):
        bad = tmp_path / "m2.txt"
        bad.write_text("atom: 0.5\n")
        load_measure(str(bad), Space(1, "l2"))
