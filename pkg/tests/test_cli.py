import json

import pytest
from click.testing import CliRunner

from freedist import suites
from freedist.cli import main
from freedist.suites import CheckResult, SuiteReport, build_report, parse_n_range, parse_report, render_json, run_suite


@pytest.fixture
def runner():
    return CliRunner()


class TestParsing:
    @pytest.mark.parametrize("text,expected", [("2..5", (2, 5)), ("3", (3, 3)), ("4..4", (4, 4))])
    def test_valid(self, text, expected):
        assert parse_n_range(text) == expected

    @pytest.mark.parametrize("text", ["1..3", "5..2", "a..b", "2..3..4", ""])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_n_range(text)

    def test_unknown_suite(self):
        with pytest.raises(ValueError, match="unknown suite"):
            run_suite("nope")


class TestResults:
    def test_bad_status(self):
        with pytest.raises(ValueError):
            CheckResult("x", "a", "maybe")

    def test_fail_gets_witness(self):
        assert CheckResult("x", "a", "fail").witness is not None

    def test_sorted_and_unique(self):
        res = run_suite("algebra", "2..3")
        ids = [r.id for r in res]
        assert ids == sorted(ids) and len(set(ids)) == len(ids)

    def test_json_roundtrip(self):
        rep = build_report("models", "2..3", timestamps=False)
        again = parse_report(render_json(rep))
        assert again == rep
        assert render_json(again) == render_json(rep)

    def test_summary_checked_on_parse(self):
        d = build_report("algebra", "2", timestamps=False).to_dict()
        d["summary"]["pass"] += 1
        with pytest.raises(ValueError):
            SuiteReport.from_dict(d)


class TestCommand:
    def test_text(self, runner):
        res = runner.invoke(main, ["--suite", "algebra", "--n", "2..3", "--no-timestamp"])
        assert res.exit_code == 0
        assert res.output.splitlines()[1].startswith("STATUS")
        assert "fail 0" in res.output.splitlines()[-1]

    def test_json_deterministic(self, runner):
        args = ["--suite", "kostant", "--n", "2..3", "--format", "json", "--no-timestamp"]
        a, b = runner.invoke(main, args), runner.invoke(main, args)
        assert a.exit_code == b.exit_code == 0
        assert a.output == b.output
        d = json.loads(a.output)
        assert d["suite"] == "kostant" and d["params"]["n"] == [2, 3]
        assert all(c["elapsed"] is None for c in d["checks"])
        assert "generated_at" not in d

    def test_timestamps(self, runner):
        res = runner.invoke(main, ["--suite", "algebra", "--n", "2", "--format", "json"])
        d = json.loads(res.output)
        assert "generated_at" in d
        assert all(isinstance(c["elapsed"], float) for c in d["checks"])

    def test_out_file(self, runner, tmp_path):
        out = tmp_path / "r.json"
        res = runner.invoke(main, ["--suite", "algebra", "--n", "2", "--format", "json", "--out", str(out)])
        assert res.exit_code == 0
        assert parse_report(out.read_text()).summary["fail"] == 0

    def test_unknown_suite_usage_error(self, runner):
        res = runner.invoke(main, ["--suite", "nope"])
        assert res.exit_code == 2

    def test_bad_range_usage_error(self, runner):
        res = runner.invoke(main, ["--n", "5..2"])
        assert res.exit_code == 2
        assert "n-range" in res.output

    def test_skipped_without_deep(self, runner):
        res = runner.invoke(main, ["--suite", "kostant", "--n", "5", "--format", "json", "--no-timestamp"])
        d = json.loads(res.output)
        assert res.exit_code == 0
        assert d["summary"]["skipped"] == 1

    def test_failure_exit_code(self, runner, monkeypatch):
        def broken(col, ns, seed, deep):
            col.check("algebra.broken", "none", lambda: (False, {"why": "planted"}))
        monkeypatch.setitem(suites._RUNNERS, "algebra", broken)
        res = runner.invoke(main, ["--suite", "algebra", "--format", "json", "--no-timestamp"])
        assert res.exit_code == 1
        d = json.loads(res.output)
        assert d["checks"][0]["witness"] == {"why": "planted"}
        assert d["summary"] == {"pass": 0, "fail": 1, "skipped": 0}
