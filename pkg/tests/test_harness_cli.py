import csv
import io
import json
import subprocess
import sys
import time

import jsonschema
import pytest

from glsov.cli import main
from glsov.harness import (SUITES, RunConfig, emit_report, load_configs, reference_configs,
                           report_csv, report_json, report_text, run_suite)

DEFINING = {"N": 3, "L": 2, "A": 1, "S": 1, "theta": ["0", "1/3"], "z": [2, 3, 5]}


@pytest.fixture(scope="module")
def qreport():
    return run_suite({"name": "def", "spec": DEFINING, "suites": ["qsystem", "wavefunction"]})


@pytest.mark.parametrize("bad", [
    {"spec": {"N": 2}},                                      # L missing
    {"spec": {"N": 2, "L": 1}, "suites": ["nonsense"]},
    {"spec": {"N": 2, "L": 1}, "ring": "quaternion"},
    {"spec": {"N": 2, "L": 1}, "seed": "zero"},
    {"spec": {"N": 2, "L": 1, "theta": ["x/y"]}},
    {"spec": {"N": 2, "L": 1}, "extra": 1},
    {"spec": {"N": 2, "L": 1}, "tolerances": {"rtt": -1}},
])
def test_schema_rejects(bad):
    with pytest.raises(jsonschema.ValidationError):
        RunConfig.from_dict(bad)


def test_schema_accepts_rational_strings():
    cfg = RunConfig.from_dict({"spec": {"N": 3, "L": 2, "theta": ["0", "1/3"], "hbar": "1/2"}})
    assert str(cfg.chain_spec().theta[1]) == "1/3"


def test_rtt_smallest_case():
    t0 = time.perf_counter()
    r = run_suite({"spec": {"N": 2, "L": 1}, "suites": ["rtt"]})
    assert time.perf_counter() - t0 < 1.0
    (s,) = r.suites
    assert s.status == "pass" and s.residuals["rtt"] == 0


def test_non_rectangular_spectrum_count():
    r = run_suite({"spec": {"N": 3, "L": 1, "nu": [2, 1, 0]}, "suites": ["b-spectrum", "sov-basis"]})
    spec_res, sov = r.suites
    assert spec_res.status == "pass"
    assert spec_res.counts["matched"] == spec_res.counts["states"] == 8
    assert sov.status == "skip" and r.passed


def test_wavefunction_counts(qreport):
    wf = qreport.suites[1]
    assert wf.status == "pass" and wf.counts["states"] == 9 and wf.counts["tuples"] == 9
    assert wf.residuals["ratio_spread"] < 1e-8


def test_failing_tolerance_is_reported():
    r = run_suite({"spec": DEFINING, "suites": ["qsystem"], "tolerances": {"qsystem": 0}})
    assert r.suites[0].residuals["wronskian"] > 0
    assert r.suites[0].status == "fail" and not r.passed


def test_suite_order_and_all():
    cfg = RunConfig.from_dict({"spec": {"N": 2, "L": 1}, "suites": ["hirota", "rtt"]})
    assert cfg.suite_list() == ["rtt", "hirota"]
    assert RunConfig.from_dict({"spec": {"N": 2, "L": 1}}).suite_list() == list(SUITES)


def test_json_roundtrip_and_encoding(qreport, tmp_path):
    text = report_json([qreport])
    data = json.loads(text)
    assert json.loads(json.dumps(data)) == data
    assert data[0]["config"]["spec"]["theta"] == ["0", "1/3"]
    (p,) = emit_report(qreport, "json", tmp_path)
    assert json.loads(p.read_text()) == data


def test_exact_rationals_as_strings():
    r = run_suite({"spec": {"N": 2, "L": 1}, "suites": ["rtt", "overlap"]})
    d = r.to_dict()
    assert d["suites"][0]["residuals"]["rtt"] == "0"
    assert d["suites"][1]["residuals"]["relative"] == "0"


def test_csv_tables(qreport, tmp_path):
    tables = report_csv([qreport])
    rows = list(csv.reader(io.StringIO(tables["states.csv"])))
    assert rows[0] == ["config", "state", "degrees", "t1_at_theta"]
    assert len(rows) - 1 == 9
    names = {p.name for p in emit_report([qreport], "csv", tmp_path)}
    assert names == {"suites.csv", "states.csv"}


def test_text_one_line_per_suite(qreport):
    lines = report_text([qreport]).strip().splitlines()
    assert len(lines) == len(qreport.suites)
    assert all("PASS" in ln for ln in lines)


def test_unknown_format(qreport, tmp_path):
    with pytest.raises(ValueError):
        emit_report(qreport, "xml", tmp_path)


def test_reports_deterministic():
    cfg = {"name": "d", "spec": {"N": 2, "L": 2, "S": 2}, "suites": ["rtt", "b-spectrum", "sov-basis"],
           "seed": 4}
    a = report_json([run_suite(cfg)], timing=False)
    b = report_json([run_suite(cfg)], timing=False)
    assert a == b
    f1 = json.loads(report_json([run_suite({**cfg, "suites": ["qsystem"]})], timing=False))
    f2 = json.loads(report_json([run_suite({**cfg, "suites": ["qsystem"]})], timing=False))
    assert f1 == f2


def test_cache_hits_reported(tmp_path):
    cfg = {"spec": {"N": 2, "L": 2}, "suites": ["b-spectrum", "sov-basis"], "cache_dir": str(tmp_path)}
    assert run_suite(cfg).cache == {"hit": 0, "miss": 2, "rebuild": 0}
    assert run_suite(cfg).cache == {"hit": 2, "miss": 0, "rebuild": 0}
    cfg["spec"]["z"] = [7, 11]
    assert run_suite(cfg).cache["hit"] == 2


def test_float_ring_passes():
    r = run_suite({"spec": DEFINING, "ring": "float", "suites": ["rtt", "b-spectrum", "sov-basis", "hirota"]})
    assert r.passed and all(s.status == "pass" for s in r.suites)


def test_reference_configs_are_valid():
    names = [c.name for c in reference_configs()]
    assert len(names) == len(set(names)) == 7


def test_load_configs_forms(tmp_path):
    one = {"spec": {"N": 2, "L": 1}, "suites": ["rtt"]}
    for body in (one, [one, one], {"runs": [one]}):
        p = tmp_path / "c.json"
        p.write_text(json.dumps(body))
        assert all(c.suites == ["rtt"] for c in load_configs(p))


def test_cli_verify_and_report(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"name": "tiny", "spec": {"N": 2, "L": 1}}))
    out = tmp_path / "out"
    assert main(["verify", "--config", str(cfg), "--suite", "rtt", "--suite", "hirota", "--out", str(out)]) == 0
    assert "PASS" in capsys.readouterr().out
    assert {p.name for p in out.iterdir()} == {"report.json", "suites.csv", "states.csv", "summary.txt"}
    assert main(["report", str(out / "report.json")]) == 0
    assert "tiny" in capsys.readouterr().out


def test_cli_failure_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"spec": DEFINING, "tolerances": {"qsystem": 0}}))
    assert main(["qsolve", "--config", str(cfg)]) == 1


def test_cli_qsolve_exports(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"name": "q", "spec": {"N": 2, "L": 2}}))
    assert main(["qsolve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    data = json.loads((tmp_path / "o" / "qsystem-q.json").read_text())
    assert len(data) == 4


def test_cli_build_and_subprocess(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"spec": {"N": 2, "L": 1}}))
    assert main(["build", "--config", str(cfg), "--cache-dir", str(tmp_path / "c")]) == 0
    assert any((tmp_path / "c").glob("B-*.bin"))
    proc = subprocess.run([sys.executable, "-m", "glsov.cli", "spectrum", "--config", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "b-spectrum" in proc.stdout
