from __future__ import annotations

import argparse
import importlib.util
import json
from fractions import Fraction
from pathlib import Path

import pytest

from hyperbinom import cli
from hyperbinom.hyper import PFQ, classify, direct_sum
from hyperbinom.identities import Mode, Status, VerificationReport
from hyperbinom.rules import RULES, Rule, TransformExpr

CLI_SPEC = importlib.util.spec_from_file_location(
    "hyper_binom_cli", Path(__file__).resolve().parents[1] / "hyper-binom.py"
)
CLI_MODULE = importlib.util.module_from_spec(CLI_SPEC)
assert CLI_SPEC.loader is not None
CLI_SPEC.loader.exec_module(CLI_MODULE)  # type: ignore[assignment]


def run(argv):
    with pytest.raises(SystemExit) as exc:
        CLI_MODULE.main(argv)
    return exc.value.code


def test_version_flag(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.startswith("hyper-binom ")


def test_verify_text_report(capsys):
    assert run(["verify", "--id", "S8", "--n", "0..5", "--format", "text"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert lines[0] == "S8 n=0 pass lhs=1 rhs=1"
    assert lines[5] == "S8 n=5 pass lhs=32 rhs=32"


def test_verify_json_report(capsys):
    assert run(["verify", "--id", "S0", "--id", "8.7", "--n", "1..3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["run"]["command"] == "verify"
    assert [check["id"] for check in report["checks"]] == ["S0"] * 3 + ["8.7"] * 3
    assert report["checks"][0]["lhs"] == "8/3"


def test_verify_writes_to_out_file(tmp_path, capsys):
    target = tmp_path / "reports" / "s8.json"
    assert run(["verify", "--id", "S8", "--n", "2", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    checks = json.loads(target.read_text(encoding="utf-8"))["checks"]
    assert checks[0]["lhs"] == "4"


def test_verify_empty_range_is_a_usage_error():
    assert run(["verify", "--id", "S0", "--n", "5..3"]) == 2


def test_verify_grid_outside_every_domain(caplog):
    caplog.set_level("INFO")
    assert run(["verify", "--id", "S7", "--n", "0"]) == 2
    assert "No grid points" in caplog.text


def test_verify_unknown_id(caplog):
    assert run(["verify", "--id", "S99"]) == 2
    assert "Unknown id" in caplog.text


def test_verify_reports_failures(monkeypatch, capsys):
    failing = VerificationReport("S8", {"n": 2}, Mode.EXACT, None, None, Status.FAIL)
    monkeypatch.setattr(cli, "verify_all", lambda config, enable_progress: [failing])
    assert run(["verify", "--id", "S8", "--n", "2"]) == 1
    assert json.loads(capsys.readouterr().out)["checks"][0]["status"] == "fail"


def test_recognize_text_output(capsys):
    argv = ["recognize", "--sum", "binom(n+k,k)/pow(2,k)", "--n", "3", "--format", "text"]
    assert run(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "prefactor 1"
    assert lines[1] == "series 1F0(4;;1/2)"
    assert lines[2].startswith("classification terminating=False truncate_at=3")
    assert lines[3] == "sum 8"


def test_recognize_infinite_range_of_a_terminating_series(capsys):
    assert run(["recognize", "--sum", "binom(n,k)", "--n", "3", "--to", "inf"]) == 0
    record = json.loads(capsys.readouterr().out)["checks"][0]
    assert record["truncate_at"] is None
    assert record["terminating"] is True
    assert record["sum"] == "8"


def test_recognize_syntax_error():
    assert run(["recognize", "--sum", "binom(n,k"]) == 2


def test_recognize_not_hypergeometric():
    assert run(["recognize", "--sum", "pow(0,k)", "--n", "2"]) == 3


def test_recognize_a_ratio_of_polynomials(capsys):
    # t_{k+1}/t_k = (3-k)/(k+1) is the ratio of binom(3,k)
    assert run(["recognize", "--ratio", "3,-1;1,1", "--format", "text"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "prefactor 1"
    assert lines[1] == "series 1F0(-3;;-1)"
    assert lines[-1] == "sum 8"


def test_recognize_ratio_with_irrational_roots():
    assert run(["recognize", "--ratio", "1,0,1;1,1"]) == 3


def test_recognize_malformed_ratio():
    assert run(["recognize", "--ratio", "1,x;1"]) == 2
    assert run(["recognize", "--ratio", "1,1"]) == 2


def test_recognize_needs_exactly_one_source():
    assert run(["recognize"]) == 2
    assert run(["recognize", "--sum", "binom(n,k)", "--ratio", "3,-1;1,1"]) == 2


def test_eval_terminating_literal(capsys):
    assert run(["eval", "--pfq", "2F1(-2,-2;1;1)", "--format", "text"]) == 0
    assert capsys.readouterr().out == "6\n"


def test_eval_numeric_literal(capsys):
    assert run(["eval", "--pfq", "1F0(1;;1/2)", "--digits", "20"]) == 0
    record = json.loads(capsys.readouterr().out)["checks"][0]
    assert record["mode"] == "numeric"
    assert float(record["value"]) == 2.0


def test_eval_divergent_literal():
    assert run(["eval", "--pfq", "2F1(1,1;1;1)"]) == 3


def test_eval_malformed_literal():
    assert run(["eval", "--pfq", "2F1(1,1;"]) == 2


def test_rules_list(capsys):
    assert run(["rules", "list", "--format", "text"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 15
    assert lines[0] == "saalschutz\tSaalschutz summation"


def test_rules_check(capsys):
    assert run(["rules", "check", "--id", "saalschutz", "--trials", "5", "--seed", "42"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["run"]["seed"] == 42
    assert len(report["checks"]) == 5
    assert {check["status"] for check in report["checks"]} == {"pass"}


def test_rules_check_unknown_rule():
    assert run(["rules", "check", "--id", "nosuch", "--trials", "1"]) == 2


def test_rules_check_prints_the_minimal_counterexample(monkeypatch, capsys):
    def off_by_one(series, **options):
        bump = 1 if (classify(series).truncation or 0) >= 2 else 0
        return TransformExpr.constant(direct_sum(series) + bump)

    def draw(rng):
        return PFQ((Fraction(-rng.randint(2, 6)), Fraction(7, 3)), (Fraction(11, 2),), 1)

    monkeypatch.setitem(RULES, "off-by-one", Rule("off-by-one", "broken", off_by_one, draw))
    argv = ["rules", "check", "--id", "off-by-one", "--trials", "2", "--format", "text"]
    assert run(argv) == 1
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("off-by-one trial 0 fail: 2F1(-")
    assert lines[0].endswith("(minimal: 2F1(-2,1;1;0))")
    assert lines[-1] == "off-by-one 0/2 trials passed"

    assert run(["rules", "check", "--id", "off-by-one", "--trials", "1"]) == 1
    record = json.loads(capsys.readouterr().out)["checks"][0]
    assert record["status"] == "fail"
    assert record["counterexample"] == "2F1(-2,1;1;0)"


def test_digits_below_minimum_is_a_usage_error():
    assert run(["eval", "--pfq", "1F0(1;;1/2)", "--digits", "5"]) == 2


def test_environment_defaults(monkeypatch):
    monkeypatch.setenv("HYPER_BINOM_DIGITS", "5")
    monkeypatch.setenv("HYPER_BINOM_JOBS", "3")
    config = cli.parse_args(["verify", "--id", "S8"])
    assert config.digits == 10
    assert config.jobs == 3
    assert cli.parse_args(["verify", "--jobs", "2"]).jobs == 2


def test_int_env_ignores_malformed_values(monkeypatch, caplog):
    monkeypatch.setenv("HYPER_BINOM_JOBS", "many")
    assert cli._int_env("HYPER_BINOM_JOBS", 1, minimum=1) == 1
    assert "not an integer" in caplog.text
    monkeypatch.setenv("HYPER_BINOM_JOBS", "  ")
    assert cli._int_env("HYPER_BINOM_JOBS", 1) == 1
    monkeypatch.setenv("HYPER_BINOM_JOBS", "0")
    assert cli._int_env("HYPER_BINOM_JOBS", 1, minimum=1) == 1
    monkeypatch.delenv("HYPER_BINOM_JOBS")
    assert cli._int_env("HYPER_BINOM_JOBS", None) is None


def test_parse_range():
    assert cli.parse_range("3") == (3, 3)
    assert cli.parse_range("0..5") == (0, 5)
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_range("x..5")
    assert cli.parse_bound("inf") == "inf"
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_bound("oo")
