"""End-to-end runs of the launcher script in a fresh interpreter."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


def launch(*args: str) -> subprocess.CompletedProcess[str]:
    return subprocess.run(
        [sys.executable, str(ROOT / "hyper-binom.py"), *args],
        cwd=ROOT,
        capture_output=True,
        text=True,
        check=False,
    )


@pytest.mark.integration
def test_verify_acceptance_points_end_to_end(tmp_path):
    """Verify a handful of identities and write the JSON report to disk.

    Args:
        tmp_path: Pytest fixture providing temporary directory.
    """
    report_path = tmp_path / "report.json"
    result = launch(
        "verify", "--id", "S0", "--id", "S8", "--id", "S1-chain", "--n", "1..10",
        "--out", str(report_path),
    )

    assert result.returncode == 0, result.stderr
    assert result.stdout == ""
    assert "checks passed" in result.stderr

    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert len(report["checks"]) == 30
    assert all(check["status"] == "pass" for check in report["checks"])


@pytest.mark.integration
def test_recognize_and_eval_end_to_end():
    recognized = launch(
        "recognize", "--sum", "binom(2k,k)*binom(2(n-k),n-k)/(1+2k)", "--n", "4",
        "--format", "text",
    )
    assert recognized.returncode == 0, recognized.stderr
    assert recognized.stdout.splitlines()[-1] == "sum 32768/315"

    evaluated = launch("eval", "--pfq", "2F1(1,1;1;1)")
    assert evaluated.returncode == 3
    assert "Divergent" in evaluated.stderr
