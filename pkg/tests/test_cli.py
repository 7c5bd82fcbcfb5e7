import csv
import io
import json
import math
import re
import subprocess
import sys

import pytest

from ratsys.cli import dumps, main

EXAMPLE = ["--params", "1,3,-4,-10"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_worked_example(capsys):
    code, out, _ = run(capsys, "classify", *EXAMPLE, "--initial", "-0.55,1.5")
    doc = json.loads(out)
    assert code == 0
    assert doc["spectrum"]["regime"] == "complex_recessive"
    assert doc["verdict"] == "accumulates_on_line"
    L = doc["behavior"]["L"]
    assert (L["a"], L["b"], L["c"]) == pytest.approx((1.0, 0.2, 0.2))


def test_classify_degenerate(capsys):
    code, _, err = run(capsys, "classify", "--params", "2,4,1,2")
    assert code == 2 and "alpha1*beta2 == alpha2*beta1" in err


def test_classify_three_periodic(capsys):
    code, out, _ = run(capsys, "classify", "--params", "2,0,0,1")
    assert code == 0 and json.loads(out)["verdict"] == "globally_3_periodic"


def test_classify_json_round_trip(capsys):
    _, out, _ = run(capsys, "classify", *EXAMPLE, "--initial", "-0.55,1.5")
    doc = json.loads(out)
    assert dumps(doc) + "\n" == out


def test_simulate_exact_discrepancy(capsys):
    code, out, _ = run(capsys, "simulate", *EXAMPLE, "--initial", "-11/20,3/2", "--steps", "200", "--exact")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["n", "x", "y", "x_closed", "y_closed", "discrepancy"]
    body = rows[1:-1]
    assert len(body) == 201 and rows[-1][:2] == ["status", "complete"]
    assert max(float(r[5]) for r in body) < 1e-8


def test_simulate_float_short_run(capsys):
    code, out, _ = run(capsys, "simulate", *EXAMPLE, "--initial", "-0.55,1.5", "--steps", "20",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["rows"]) == 21
    assert max(r["discrepancy"] for r in doc["rows"]) < 1e-8


def test_simulate_beta2_zero(capsys):
    code, out, _ = run(capsys, "simulate", "--params", "1,1,-1,0", "--initial", "0,1", "--steps", "8")
    rows = list(csv.reader(io.StringIO(out)))[1:-1]
    assert code == 0 and all(float(r[5]) < 1e-12 for r in rows)
    assert [float(v) for v in rows[4][1:3]] == pytest.approx([0.0, 1.0])


def test_simulate_forbidden_start(capsys):
    code, _, err = run(capsys, "simulate", *EXAMPLE, "--initial", "3,0")
    assert code == 4 and "witness n = 1" in err


def test_forbidden_records(capsys):
    code, out, _ = run(capsys, "forbidden", "--params", "1,2,3,0", "--forbidden-horizon", "30")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows == [["n", "a", "b", "c"], ["1", "0", "1", "0"]]
    _, out, _ = run(capsys, "forbidden", *EXAMPLE, "--forbidden-horizon", "8", "--format", "json")
    recs = json.loads(out)
    assert 1 <= len(recs) <= 8 and recs[0] == {"n": 1, "a": 0, "b": 1, "c": 0}


def test_sweep_single_cell(capsys):
    code, out, _ = run(capsys, "sweep", "--alpha1", "1", "--beta1", "3", "--alpha2", "-4", "--beta2", "-10")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1 and rows[0]["regime"] == "complex_recessive"


def test_sweep_degenerate_cells(capsys):
    # alpha1*beta2 == alpha2*beta1 at alpha1 = 1 on this grid
    code, out, _ = run(capsys, "sweep", "--alpha1", "0:2", "--beta1", "2", "--alpha2", "1", "--beta2", "2",
                       "--samples", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["status"] for r in rows] == ["ok", "degenerate", "ok"]


def test_sweep_alpha1_zero_slice(capsys):
    code, out, _ = run(capsys, "sweep", "--alpha1", "0", "--beta1", "-2:2", "--alpha2", "0.5:3",
                       "--beta2", "-1:1", "--samples", "4")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 64
    assert all(r["period2_exists"] == "true" for r in rows)


def test_sweep_parallel_matches_serial(capsys):
    args = ["sweep", "--alpha1", "-1:1", "--beta1", "0.5", "--alpha2", "-2:2", "--beta2", "1", "--samples", "5"]
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--jobs", "2")
    assert serial == parallel


def test_sweep_bad_range(capsys):
    code, _, err = run(capsys, "sweep", "--alpha1", "2:1", "--beta1", "1", "--alpha2", "1", "--beta2", "1")
    assert code == 3 and err


def _lines(svg):
    return {m.group(1): tuple(float(m.group(k)) for k in (2, 3, 4))
            for m in re.finditer(r'<line class="([\w-]+)" data-a="([^"]+)" data-b="([^"]+)" data-c="([^"]+)"', svg)}


def test_portrait_lines(capsys):
    code, out, _ = run(capsys, "portrait", *EXAMPLE, "--viewport", "-3,3,-3,3", "--orbits", "3")
    assert code == 0 and out.startswith("<?xml") and out.rstrip().endswith("</svg>")
    lines = _lines(out)
    assert lines["line-L"] == pytest.approx((1.0, 0.2, 0.2))
    assert lines["line-parallel"] == pytest.approx((1.0, 0.2, 0.3))
    assert out.count('stroke-dasharray') >= 2


def test_portrait_no_orbits(capsys):
    code, out, _ = run(capsys, "portrait", *EXAMPLE, "--orbits", "0")
    assert code == 0 and "orbit-0" not in out and "line-L" in out


def test_portrait_empty_viewport(capsys):
    code, _, err = run(capsys, "portrait", *EXAMPLE, "--viewport", "1,1,0,2")
    assert code == 3 and "viewport" in err


def test_portrait_conic(capsys):
    # lambda = rho = 1, theta = 1 rad
    b1 = 1 + 2 * math.cos(1.0)
    a2 = -(2 * math.cos(1.0) + 1)
    params = f"{b1 * a2 + 1!r},{b1!r},{a2!r},1"
    code, out, _ = run(capsys, "portrait", "--params", params, "--initial", "0.3,0.9", "--orbits", "1")
    assert code == 0 and 'class="conic"' in out


def test_help(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0 and "classify" in capsys.readouterr().out


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("params = 2,0,0,1\n# comment\nhorizon = 50\n")
    _, out, _ = run(capsys, "classify", "--config", str(cfg))
    doc = json.loads(out)
    assert doc["config"]["params"] == [2, 0, 0, 1] and doc["config"]["horizon"] == 50
    _, out, _ = run(capsys, "classify", "--config", str(cfg), "--horizon", "70")
    assert json.loads(out)["config"]["horizon"] == 70


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ratsys", "classify", "--params", "2,0,0,1"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["verdict"] == "globally_3_periodic"
