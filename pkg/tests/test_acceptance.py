"""Runs the thirteen acceptance criteria; each prints its PASS/FAIL line to the terminal."""

from pathlib import Path

import pytest

from laxkit import acceptance

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    r = acceptance.run_criterion(number, configs=str(CONFIGS))
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.line()


def test_builtin_cli_configs_match_fixtures():
    # the module carries copies so it runs outside a checkout; keep them in sync
    for name, text in acceptance.CLI_CONFIGS.items():
        fixture = (CONFIGS / name).read_text()
        body = "".join(line + "\n" for line in fixture.splitlines()
                       if line.strip() and not line.lstrip().startswith("#"))
        assert body == text, name


def test_runtime_limits_are_enforced(monkeypatch):
    slow = lambda **_: (True, "ok", {"runtime_limit": 0.0})  # noqa: E731
    monkeypatch.setitem(acceptance.CRITERIA, 99, ("slow", slow))
    assert not acceptance.run_criterion(99).passed


def test_module_main_only(capsys):
    assert acceptance.main(["--only", "12"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("[PASS] criterion 12") and "1/1 criteria pass" in out
