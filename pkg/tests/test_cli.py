"""Command-line behaviour: output schema, exit codes, determinism."""
import csv
import io
import json
import math

import pytest

from bellopt import cli
from bellopt import closed_form as cf
from bellopt import fock


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_state_vacuum(capsys):
    code, out, _ = run(capsys, "state", "--gamma", "0", "--cutoff", "5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["weight"]) == 1.0


def test_state_weights(tmp_path, capsys):
    path = tmp_path / "w.csv"
    code, _, _ = run(capsys, "state", "--gamma", "0.5", "--cutoff", "15", "--out", str(path))
    rows = list(csv.DictReader(path.open()))
    assert code == 0 and len(rows) == 16
    for r in rows:
        assert float(r["weight"]) == pytest.approx(fock.sector_weight(0.5, int(r["pairs"])), rel=1e-11)


def test_negative_gain_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["state", "--gamma", "-1"])
    assert exc.value.code == 2
    assert "--gamma" in capsys.readouterr().err


def test_unknown_kind_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["correlate", "--kind", "Q", "--gamma", "0.1"])
    assert exc.value.code == 2


def test_correlate_vacuum(capsys):
    code, out, _ = run(capsys, "correlate", "--kind", "C", "--gamma", "0", "--theta", "0", "--phi", "0")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 1.0 and doc["schema_version"] == "1"


def test_correlate_closed_form(capsys):
    _, out, _ = run(capsys, "correlate", "--kind", "C", "--gamma", "0.5", "--theta", "0.3", "--phi", "0.1", "--cutoff", "auto")
    assert json.loads(out)["value"] == pytest.approx(cf.c_closed(0.5, 0.4), abs=1e-8)


def test_correlate_degrees(capsys):
    _, out, _ = run(capsys, "correlate", "--kind", "C", "--gamma", "0.5", "--theta", "30", "--phi", "10", "--degrees")
    assert json.loads(out)["value"] == pytest.approx(cf.c_closed(0.5, math.radians(40)), abs=1e-8)


def test_correlate_e_vacuum_error(capsys):
    code, out, _ = run(capsys, "correlate", "--kind", "E", "--gamma", "0")
    doc = json.loads(out)
    assert code == 0 and doc["error"] == "zero intensity denominator"


def test_chsh_report(capsys):
    code, out, _ = run(capsys, "chsh", "--correlator", "C", "--gamma", "0.8", "--optimal-settings")
    row = next(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(row["margin"]) > 0
    assert float(row["lhs"]) == pytest.approx(2.081, abs=1e-3)


def test_chsh_missing_settings(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["chsh", "--gamma", "0.5"])
    assert exc.value.code == 2


def test_csv_twelve_digits(capsys):
    _, out, _ = run(capsys, "chsh", "--correlator", "C", "--gamma", "0.8", "--optimal-settings", "--source", "closed_form")
    lhs = next(csv.DictReader(io.StringIO(out)))["lhs"]
    assert lhs == f"{cf.chsh_c_max(0.8):.12g}"


def test_json_schema(capsys):
    _, out, _ = run(capsys, "ch", "--gamma", "0.3", "--optimal-settings", "--format", "json")
    doc = json.loads(out)
    assert doc["schema_version"] == "1" and doc["rows"][0]["kind"] == "CH_K"
    assert doc["rows"][0]["violated"] is True


def test_chained(capsys):
    code, out, _ = run(capsys, "chained", "--correlator", "dist-int", "--L", "2", "--gamma", "0.95", "--cutoff", "25")
    row = next(csv.DictReader(io.StringIO(out)))
    assert code == 0 and row["violated"] == "false"


def test_critical_bracket_failure(capsys):
    code, _, err = run(capsys, "critical", "--kind", "CHSH_C", "--gamma-max", "0.5")
    assert code == 3 and "bracket" in err


def test_loophole_demo(capsys):
    code, out, _ = run(capsys, "loophole-demo", "--M", "10", "--eps", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    declared = {r["kind"]: float(r["lhs"]) for r in rows if r["note"] == "declared totals"}
    projected = {r["kind"]: float(r["lhs"]) for r in rows if r["note"] == "constrained projection"}
    assert declared["CHSH_E"] >= 10 and declared["CHSH_C"] <= 2
    assert projected["CHSH_E"] <= 2


def test_fuzz_summary_and_determinism(tmp_path, capsys):
    paths = [tmp_path / f"f{i}.csv" for i in range(2)]
    for p in paths:
        assert cli.main(["fuzz", "--samples", "200", "--seed", "7", "--out", str(p)]) == 0
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert a.decode().rstrip().splitlines()[-1] == "violations: 0"


def test_visibility(capsys):
    _, out, _ = run(capsys, "visibility", "--gmax", "0.1", "--step", "0.05")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 and float(rows[0]["v_new"]) == 1.0


def test_stokes(capsys):
    _, out, _ = run(capsys, "correlate", "--kind", "stokes", "--gamma", "0.6", "--theta", "0.4")
    assert abs(json.loads(out)["value"]) < 1e-12
