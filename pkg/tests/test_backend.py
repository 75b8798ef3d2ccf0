import json
import os
import subprocess
import sys

import pytest

from paulivol import _backend


def run_cli(env_extra, *argv):
    env = dict(os.environ, **env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "paulivol", *argv], capture_output=True, text=True, env=env, check=True
    )
    return json.loads(proc.stdout)


def test_forced_fallback_reports_python_backend():
    env = run_cli({"PAULIVOL_PURE_PYTHON": "1"}, "classify", "--x", "0,0,0", "--seed", "1")
    assert env["backend"] == "python"


@pytest.mark.skipif(not _backend.COMPILED, reason="compiled extension not built")
def test_backends_give_identical_volume_payloads():
    argv = ("volume", "--region", "cp", "--samples", "200000", "--seed", "3")
    fast = run_cli({}, *argv)
    slow = run_cli({"PAULIVOL_PURE_PYTHON": "1"}, *argv)
    assert fast["backend"] == "cython" and slow["backend"] == "python"
    assert fast["result"] == slow["result"]


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get_kernels("fortran")
