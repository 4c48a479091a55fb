"""Deterministic desk-scale driving-simulator core.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports it and adds a couple of conveniences.
"""

from pathlib import Path

from ._core import *  # noqa: F401,F403
from ._core import RunLog, Scenario, simulate

__version__ = "1.0.0"


def run_file(scenario_path, out_dir=None, **kwargs) -> RunLog:
    """Loads a scenario file, runs it and optionally writes the run directory."""
    log = simulate(Scenario.from_file(Path(scenario_path)), **kwargs)
    if out_dir is not None:
        log.write(Path(out_dir))
    return log
