"""Command line driver: runners, caps, report schema, golden comparison."""

import json

import pytest

from crosscap_calc import SCHEMA_VERSION, __version__, cli
from crosscap_calc.cli import (
    CHECK_NAMES,
    DEFAULT_CAPS,
    RunConfig,
    SchemaMismatchError,
    effective_caps,
    golden_compare,
    main,
    parse_cap_overrides,
    parse_range,
    run,
)


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestParsing:
    def test_parse_range(self):
        assert parse_range("5") == (5, 5)
        assert parse_range("3..8") == (3, 8)

    def test_parse_range_rejects_junk(self):
        for bad in ("", "8..3", "3..", "a..b", "3-8"):
            with pytest.raises(ValueError):
                parse_range(bad)

    def test_parse_cap_overrides(self):
        assert parse_cap_overrides("chain=8,o2=6") == {"chain": 8, "o2": 6}
        assert parse_cap_overrides("") == {}

    def test_parse_cap_overrides_rejects_junk(self):
        for bad in ("chain", "chain=x", "nope=4"):
            with pytest.raises(ValueError):
                parse_cap_overrides(bad)

    def test_effective_caps_precedence(self, monkeypatch):
        monkeypatch.setenv(cli.CAP_ENV_VAR, "chain=9")
        caps = effective_caps({"chain": 11})
        assert caps["chain"] == 11  # explicit config beats environment
        monkeypatch.setenv(cli.CAP_ENV_VAR, "o2=6")
        assert effective_caps({})["o2"] == 6
        monkeypatch.delenv(cli.CAP_ENV_VAR)
        assert effective_caps({}) == DEFAULT_CAPS


class TestRun:
    def test_report_shape(self):
        report = run(RunConfig(check="chain", value_range=(1, 2)))
        assert report["schema_version"] == SCHEMA_VERSION
        assert report["tool"] == "crosscap-calc"
        assert report["tool_version"] == __version__
        assert report["config"]["check"] == "chain"
        assert report["config"]["range"] == "1..2"
        assert report["overall_pass"] is True
        assert {e["k"] for e in report["checks"]} == {1, 2}
        for entry in report["checks"]:
            assert entry["failed"] == 0
            assert isinstance(entry["duration_ms"], int)

    def test_every_check_runs_at_minimum_scope(self):
        for name in CHECK_NAMES:
            lo = cli.min_scope(name)
            report = run(RunConfig(check=name, value_range=(lo, lo)))
            assert report["overall_pass"] is True, name

    def test_cap_violation_is_reported_not_raised(self):
        report = run(RunConfig(check="chain", value_range=(1, 7)))
        assert report["overall_pass"] is False
        names = [e["check"] for e in report["checks"]]
        assert "chain:cap" in names
        cap_entry = next(e for e in report["checks"] if e["check"] == "chain:cap")
        assert cap_entry["failed"] == 1

    def test_cap_override_unlocks_scope(self):
        report = run(
            RunConfig(check="chain", value_range=(7, 7), cap_overrides={"chain": 7})
        )
        assert report["overall_pass"] is True

    def test_dimension_capped_check_uses_rank_not_genus(self):
        # transversal cap bounds the quotient dimension 2^rank, not g itself
        report = run(RunConfig(check="transversal", value_range=(3, 7)))
        assert report["overall_pass"] is True
        report = run(
            RunConfig(
                check="transversal",
                value_range=(9, 9),
                cap_overrides={"transversal": 16},
            )
        )
        assert report["overall_pass"] is False
        assert report["checks"][0]["check"] == "transversal:cap"

    def test_unknown_check_rejected(self):
        with pytest.raises(ValueError):
            run(RunConfig(check="nonsense"))


class TestMainVerify:
    def test_json_emission(self, capsys):
        code, report = run_json(capsys, "verify", "quotient-rank", "--g", "3..6")
        assert code == 0
        assert report["overall_pass"] is True
        assert len(report["checks"]) == 4

    def test_markdown_emission(self, capsys):
        code = main(["verify", "chain", "--k", "1..3", "--emit", "markdown"])
        out = capsys.readouterr().out
        assert code == 0
        assert "| check | scope | passed | failed | notes |" in out

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "report.json"
        code = main(["verify", "o2", "--g", "3", "--out", str(path)])
        assert code == 0
        report = json.loads(path.read_text())
        assert report["config"]["check"] == "o2"
        assert capsys.readouterr().out == ""  # --out writes the file, nothing else

    def test_cap_violation_exit_code(self, capsys):
        code, report = run_json(capsys, "verify", "chain", "--k", "7")
        assert code == 1
        assert report["checks"][0]["check"] == "chain:cap"

    def test_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.CAP_ENV_VAR, "chain=7")
        code, report = run_json(capsys, "verify", "chain", "--k", "7")
        assert code == 0
        assert report["overall_pass"] is True

    def test_wrong_scope_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "chain", "--g", "4"])
        assert exc.value.code == 2

    def test_conflicting_scope_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "all", "--g", "4", "--k", "2"])
        assert exc.value.code == 2

    def test_all_restricts_ranges_per_check(self, capsys):
        code, report = run_json(capsys, "verify", "all", "--g", "3..4")
        assert code == 0
        # the g-scoped checks honor the cut-down range ...
        assert {e["g"] for e in report["checks"] if "g" in e} == {3, 4}
        # ... while k/n-scoped checks keep their defaults
        assert {e["k"] for e in report["checks"] if "k" in e} == set(range(1, 7))
        assert {e["n"] for e in report["checks"] if "n" in e} == set(range(1, 9))

    def test_seed_is_threaded_through(self, capsys):
        code, report = run_json(capsys, "verify", "stabilizer", "--g", "5", "--seed", "3")
        assert code == 0
        assert report["config"]["seed"] == 3


class TestGolden:
    @pytest.fixture()
    def report_path(self, tmp_path):
        path = tmp_path / "report.json"
        assert main(["verify", "chain", "--k", "1..2", "--out", str(path)]) == 0
        return path

    def test_match(self, report_path, tmp_path, capsys):
        golden = tmp_path / "golden.json"
        # timings differ run to run; comparison must ignore them
        fresh = tmp_path / "fresh.json"
        assert main(["verify", "chain", "--k", "1..2", "--out", str(fresh)]) == 0
        golden.write_text(report_path.read_text())
        assert main(["golden", str(fresh), str(golden)]) == 0

    def test_tamper_detected(self, report_path, tmp_path, capsys):
        doc = json.loads(report_path.read_text())
        doc["checks"][0]["passed"] = 999
        golden = tmp_path / "golden.json"
        golden.write_text(json.dumps(doc))
        assert main(["golden", str(report_path), str(golden)]) == 1
        out = capsys.readouterr().out
        assert "checks[0].passed" in out

    def test_schema_mismatch(self, report_path, tmp_path, capsys):
        doc = json.loads(report_path.read_text())
        doc["schema_version"] = 99
        golden = tmp_path / "golden.json"
        golden.write_text(json.dumps(doc))
        assert main(["golden", str(report_path), str(golden)]) == 2

    def test_golden_compare_units(self):
        a = {"schema_version": SCHEMA_VERSION, "x": 1, "checks": [{"duration_ms": 5}]}
        b = {"schema_version": SCHEMA_VERSION, "x": 1, "checks": [{"duration_ms": 9}]}
        assert golden_compare(a, b) == []
        b["x"] = 2
        assert golden_compare(a, b) == ["x: 1 != golden 2"]
        b["schema_version"] = 0
        with pytest.raises(SchemaMismatchError):
            golden_compare(a, b)
