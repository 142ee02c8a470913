import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def result_dir(tmp_path_factory):
    """CSV outputs produced by the analysis CLI at desk scale.

    The renderer consumes the primary component only through its files,
    which these subprocess calls generate.
    """
    out = tmp_path_factory.mktemp("results")
    cmds = [
        ["reproduce", "fig3", "--trials", "40", "--seed", "3", "--out", str(out)],
        ["reproduce", "fig4", "--trials", "12", "--seed", "3", "--out", str(out)],
        ["reproduce", "fig5", "--grid", "8", "--out", str(out)],
        ["reproduce", "fig6", "--trials", "0", "--out", str(out)],
        ["reproduce", "fig7", "--trials", "0", "--out", str(out)],
    ]
    for cmd in cmds:
        subprocess.run(
            [sys.executable, "-m", "bwpc.cli", *cmd],
            check=True,
            capture_output=True,
            text=True,
        )
    return out
