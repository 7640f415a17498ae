import pathlib
import runpy

import pytest

from rigidcalc.cli import Flags, run_file

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"
EXPECTED_STATUS = {"counterexample.rc": 1}


@pytest.mark.parametrize("script", sorted(p.name for p in DEMOS.glob("*.rc")))
def test_demo_script(script, capsys):
    status = run_file(str(DEMOS / script), Flags())
    assert status == EXPECTED_STATUS.get(script, 0), capsys.readouterr().out


def test_python_demo(capsys):
    runpy.run_path(str(DEMOS / "api_tour.py"), run_name="__main__")
    assert "tower holds: True" in capsys.readouterr().out
