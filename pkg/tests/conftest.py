"""Shared fixtures: the reference scenario is run once per session."""

import time
from types import SimpleNamespace

import pytest

from peasim import reference_experiment, run_scenario


@pytest.fixture(scope="session")
def reference_run():
    """Full reference experiment, executed once and shared read-only.

    Carries the script, the config, the RunResult and the wall-clock
    time of the run (used by the runtime acceptance check).
    """
    script, cfg = reference_experiment()
    t0 = time.perf_counter()
    result = run_scenario(script, cfg)
    wall = time.perf_counter() - t0
    return SimpleNamespace(script=script, cfg=cfg, result=result, wall=wall)
