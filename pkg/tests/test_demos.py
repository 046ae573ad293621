"""Every demo script runs to completion and prints what it promises."""

import subprocess
import sys
from pathlib import Path

import pytest

DEMOS = sorted((Path(__file__).resolve().parents[1] / "demos").glob("*.py"))


@pytest.mark.parametrize("script", DEMOS, ids=lambda p: p.name)
def test_demo_runs(script):
    proc = subprocess.run(
        [sys.executable, str(script)], capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip()


def test_all_demos_present():
    assert [p.name.split("_")[0] for p in DEMOS] == ["01", "02", "03", "04", "05", "06"]


def test_demo_outputs_spot_checks():
    out = subprocess.run(
        [sys.executable, str(DEMOS[0])], capture_output=True, text=True, timeout=120
    ).stdout
    assert "backward elimination keeps: f1 f2 f4" in out

    out = subprocess.run(
        [sys.executable, str(DEMOS[3])], capture_output=True, text=True, timeout=120
    ).stdout
    assert "identical: True" in out
    assert "decrypts during selection: 0" in out
