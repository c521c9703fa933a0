"""
Tests for the acceptance self-test runner.
"""

import json

import pytest

from app.cli import run
from modules.selftest import CRITERIA, run_selftest


class TestRunner:
    """The summary frame and its exit code."""

    def test_columns(self):
        frame = run_selftest(samples=10, seed=1, only=[2])
        assert list(frame.columns) == ["criterion", "title", "passed", "detail", "seconds"]
        assert frame["criterion"].tolist() == [2]

    @pytest.mark.parametrize("number", [2, 4, 8, 9])
    def test_fast_criteria_pass(self, number):
        frame = run_selftest(samples=10, seed=1, only=[number])
        assert frame["passed"].item(), frame["detail"].item()

    def test_progress_reaches_one(self):
        seen = []
        run_selftest(samples=5, seed=1, only=[2, 9], progress_callback=lambda f, msg: seen.append(f))
        assert seen[0] == 0.0
        assert seen[-1] == 1.0

    def test_exceptions_become_failed_rows(self, monkeypatch):
        def broken(samples, seed):
            raise RuntimeError("boom")

        monkeypatch.setitem(CRITERIA, 2, ("broken", broken))
        frame = run_selftest(samples=5, seed=1, only=[2])
        assert not frame["passed"].item()
        assert frame["detail"].item() == "RuntimeError: boom"

    def test_cli(self, capsys):
        assert run(["selftest", "--only", "2", "--samples", "10"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["passed"] is True
        assert out["criteria"][0]["criterion"] == 2

    def test_cli_unknown_criterion(self):
        assert run(["selftest", "--only", "42"]) == 2
