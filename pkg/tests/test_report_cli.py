import io
import json

import pytest
from click.testing import CliRunner

from unlockable import report
from unlockable.cli import cli
from unlockable.report import CheckRecord, ReportDocument


@pytest.fixture
def runner():
    return CliRunner()


def sample_doc(passed=True):
    return ReportDocument("0.1.0", {"name": "demo"}, [
        CheckRecord("one", report.STATED, True, 1e-10, {"x": 0.1 + 0.2, "n": 3, "items": [1.5, 2]}),
        CheckRecord("two", report.DERIVED, passed, None, {"label": "(1,2)"}),
    ])


class TestReport:
    def test_json_round_trip(self):
        doc = sample_doc()
        back = ReportDocument.from_dict(json.loads(report.to_json(doc)))
        assert back.to_dict() == doc.to_dict()
        assert back.checks[0].values["x"] == 0.1 + 0.2

    def test_deterministic_bytes(self):
        assert report.to_json(sample_doc()) == report.to_json(sample_doc())
        assert report.to_text(sample_doc()) == report.to_text(sample_doc())

    def test_verdict(self):
        assert sample_doc().verdict == "pass"
        assert sample_doc(False).verdict == "fail"
        assert json.loads(report.to_json(sample_doc(False)))["verdict"] == "fail"

    def test_empty_document(self):
        doc = ReportDocument("0.1.0", {"name": "empty"})
        assert doc.passed
        d = json.loads(report.to_json(doc))
        assert d["checks"] == [] and d["verdict"] == "pass" and d["schema"] == "1"
        text = report.to_text(doc)
        assert "checks: 0  failed: 0" in text and "verdict: PASS" in text

    def test_text_lines(self):
        text = report.to_text(sample_doc(False))
        lines = text.splitlines()
        assert any(l.split()[:2] == ["PASS", "one"] for l in lines)
        assert any(l.split()[:2] == ["FAIL", "two"] for l in lines)
        assert "x=0.30000000000000004" in text

    def test_numpy_values_serialized(self):
        import numpy as np
        doc = ReportDocument("v", {}, [CheckRecord("c", report.DEMO, True, None,
                                                   {"f": np.float64(0.5), "i": np.int64(2), "nan": float("nan")})])
        vals = json.loads(report.to_json(doc))["checks"][0]["values"]
        assert vals == {"f": 0.5, "i": 2, "nan": "nan"}

    def test_schema_mismatch(self):
        d = sample_doc().to_dict()
        d["schema"] = "0"
        with pytest.raises(ValueError):
            ReportDocument.from_dict(d)

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            report.emit_report(sample_doc(), "xml", io.StringIO())


class TestCLI:
    def test_check_cuts(self, runner):
        res = runner.invoke(cli, ["check-cuts"])
        assert res.exit_code == 0, res.output
        assert "verdict: PASS" in res.output

    def test_json_output(self, runner):
        res = runner.invoke(cli, ["check-invariance", "--format", "json"])
        assert res.exit_code == 0
        doc = json.loads(res.output)
        assert doc["command"]["name"] == "check-invariance" and doc["verdict"] == "pass"

    def test_byte_identical_runs(self, runner):
        a = runner.invoke(cli, ["unlock", "--merge", "CD", "--seed", "3", "--format", "json"]).output
        b = runner.invoke(cli, ["unlock", "--merge", "CD", "--seed", "3", "--format", "json"]).output
        assert a == b

    @pytest.mark.parametrize("merge", ["CD", "B,D", "ab"])
    def test_unlock_pairs(self, runner, merge):
        assert runner.invoke(cli, ["unlock", "--merge", merge]).exit_code == 0

    def test_unlock_qudit(self, runner):
        res = runner.invoke(cli, ["unlock", "--merge", "CD", "--d", "3", "--corrector", "b"])
        assert res.exit_code == 0, res.output

    @pytest.mark.parametrize("args", [
        ["unlock", "--merge", "CC"],
        ["unlock", "--merge", "CDE"],
        ["unlock", "--merge", "CD", "--corrector", "C"],
        ["unlock", "--merge", "AD", "--d", "3"],
        ["unlock"],
        ["qudit-suite", "--d", "6"],
        ["check-cuts", "--format", "yaml"],
        ["no-such-command"],
    ])
    def test_usage_errors(self, runner, args):
        assert runner.invoke(cli, args).exit_code == 2

    def test_failure_exit_code(self, runner):
        # a negative fidelity tolerance makes every fidelity check fail
        res = runner.invoke(cli, ["unlock", "--merge", "CD", "--fidelity-tol", "-1"])
        assert res.exit_code == 1
        assert "verdict: FAIL" in res.output

    def test_env_tolerance(self, runner):
        ok = runner.invoke(cli, ["check-cuts"], env={"UNLOCKABLE_TOL": "1e-10"})
        assert ok.exit_code == 0
        # an impossibly strict tolerance is still honoured by the 2:2 PPT checks
        bad = runner.invoke(cli, ["check-cuts"], env={"UNLOCKABLE_TOL": "-1"})
        assert bad.exit_code == 1
        assert runner.invoke(cli, ["check-cuts"], env={"UNLOCKABLE_TOL": "abc"}).exit_code == 2

    def test_flag_overrides_env(self, runner):
        res = runner.invoke(cli, ["check-cuts", "--ppt-tol", "1e-10"], env={"UNLOCKABLE_TOL": "-1"})
        assert res.exit_code == 0

    def test_output_file(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = runner.invoke(cli, ["expansion-check", "--format", "json", "-o", str(out)])
        assert res.exit_code == 0 and res.output == ""
        assert json.loads(out.read_text())["verdict"] == "pass"

    def test_unwritable_output(self, runner, tmp_path):
        res = runner.invoke(cli, ["expansion-check", "-o", str(tmp_path / "missing" / "r.txt")])
        assert res.exit_code == 1

    def test_teleport_demo(self, runner):
        assert runner.invoke(cli, ["teleport-demo", "--seed", "5"]).exit_code == 0

    def test_qudit_suite(self, runner):
        res = runner.invoke(cli, ["qudit-suite", "--d", "3", "--format", "json"])
        assert res.exit_code == 0
        assert json.loads(res.output)["command"]["d"] == 3

    def test_version(self, runner):
        res = runner.invoke(cli, ["--version"])
        assert res.exit_code == 0 and "unlockable" in res.output
