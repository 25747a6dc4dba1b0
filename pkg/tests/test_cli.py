import csv
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from metric_approx import cli
from metric_approx import experiments as ex
from metric_approx import limsup as ls
from metric_approx.errors import ResourceLimit


def run_cli(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def test_list_names_every_experiment(capsys):
    assert cli.main(["list"]) == 0
    text = capsys.readouterr().out
    for name in ex.CATALOGUE:
        assert name in text


def test_gen_rationals_writes_fraction_cells(tmp_path):
    code, out = run_cli(tmp_path, "gen-rationals", "--kind", "classic", "--qmax", "4")
    assert code == 0
    with open(out / "rationals.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["q", "point"]
    assert ["3", "2/3"] in rows and ["4", "1/1"] in rows
    assert len(rows) - 1 == 2 + 3 + 4 + 5


def test_check_scheme_passes(tmp_path):
    code, out = run_cli(tmp_path, "check-scheme", "--kind", "cantor-endpoint", "--qmax", "81")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] and summary["records"][0]["value"] == "81/81"


def test_cover_reports_exact_measure(tmp_path):
    code, out = run_cli(tmp_path, "cover", "--kind", "classic", "--t", "2", "--qmin", "3", "--qmax", "10")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    measure = next(r["value"] for r in summary["records"] if r["metric"] == "covered_measure")
    exact = ls.build_cover(ls.CoverSpec(ls.sc.classic(), 2, 3, 10)).covered_measure
    assert Fraction(measure) == exact


def _snapshot(out):
    files = {f.name: f.read_bytes() for f in out.iterdir()}
    summary = json.loads(files.pop("summary.json"))
    summary.pop("timestamp")
    return summary, files


def test_rerun_is_byte_identical_apart_from_timestamp(tmp_path):
    out = tmp_path / "run"
    args = ["reproduce", "thm-2.1-mass", "--out", str(out)]
    assert cli.main(args) == 0
    first = _snapshot(out)
    assert cli.main(args) == 0
    assert _snapshot(out) == first


def test_mismatch_exits_one(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "reproduce", "jarnik-besicovitch", "--qmax", "3000", "--tolerance", "1e-9")
    assert code == 1
    assert "FAIL critical_exponent" in capsys.readouterr().out


def test_schema_error_reports_path(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"command": "cover", "scheme": {"kind": "classic"}, "q_max": "many"}))
    assert cli.main(["cover", "--config", str(cfg)]) == 2
    assert "q_max" in capsys.readouterr().err


def test_unknown_field_rejected():
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.from_dict({"command": "cover", "colour": "blue"})


def test_unknown_experiment_exits_two(tmp_path):
    code, _ = run_cli(tmp_path, "reproduce", "no-such-thing")
    assert code == 2


def test_resource_limit_exits_three(tmp_path, monkeypatch):
    def boom(spec, **kw):
        raise ResourceLimit("ball budget exhausted")
    monkeypatch.setattr(ls, "build_cover", boom)
    code, out = run_cli(tmp_path, "cover", "--kind", "classic")
    assert code == 3
    assert json.loads((out / "summary.json").read_text())["partial"]


def test_threads_fall_back_to_environment(monkeypatch):
    cfg = ex.ExperimentConfig.from_dict({"command": "dirichlet"})
    monkeypatch.setenv(ex.THREADS_ENV, "3")
    assert cfg.resolved_threads() == 3
    monkeypatch.setenv(ex.THREADS_ENV, "zero")
    assert cfg.resolved_threads() == 1
    cfg.threads = 2
    assert cfg.resolved_threads() == 2


def test_config_file_round_trip(tmp_path):
    cfg = {"command": "dim", "scheme": {"kind": "classic"}, "t": "2", "q_max": 2000}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "o"
    assert cli.main(["dim", "--config", str(path), "--out", str(out)]) == 0
    assert json.loads((out / "summary.json").read_text())["config"]["q_max"] == 2000


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "metric_approx.cli", "list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "prop-3.5" in proc.stdout


def test_docs_schema_matches_packaged_schema():
    docs = Path(__file__).resolve().parents[1] / "docs" / "config.schema.json"
    assert json.loads(docs.read_text()) == ex.load_schema()
