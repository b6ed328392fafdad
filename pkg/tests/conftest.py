"""Shared fixtures: the full-size default study is expensive, so it runs
once per session and is reused by the experiment property tests and the
acceptance suite."""

from __future__ import annotations

import time

import pytest

from interleaved_lls import ExperimentConfig, run_monte_carlo


@pytest.fixture(scope="session")
def figure_run():
    """Default configuration at full iteration count, with wall time."""
    config = ExperimentConfig()
    start = time.perf_counter()
    result = run_monte_carlo(config, threads=1)
    elapsed = time.perf_counter() - start
    return config, result, elapsed


@pytest.fixture(scope="session")
def figure_run_small():
    """Same configuration at a tenth of the iterations, for SE scaling."""
    config = ExperimentConfig(iterations=500)
    return config, run_monte_carlo(config, threads=1)
