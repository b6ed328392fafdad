"""Monte Carlo bias/MSE study across five training scenarios.

Each iteration draws fresh data (the population ground truth stays fixed
across iterations), trains every configured scenario, and records the
per-step signed bias against the blended-population weights and the
per-step prediction MSE on held-out blended test blocks.  Aggregates are
means and standard errors over iterations.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .blocks import DataBlock, center_blocks
from .exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    MonteCarloAbortError,
    SingularSystemError,
    SingularUpdateError,
)
from .interleave import InterleaveOrder, MixtureSpec, run_interleaved
from .kernel import run_blocks
from .synthdata import (
    DatasetBundle,
    PenguinMode,
    PenguinRule,
    PopulationSpec,
    SeedPlan,
    gen_population_params,
    generate_bundle,
)

#: Master seed used by the default configuration and the acceptance fixtures.
DEFAULT_MASTER_SEED = 158

#: Abort the aggregation when more than this fraction of iterations fail.
FAILURE_ABORT_FRACTION = 0.01

RESULTS_HEADER = (
    "scenario",
    "step",
    "mean_bias",
    "se_bias",
    "mean_mse",
    "se_mse",
    "n_failed",
)


class Scenario(Enum):
    """The five training scenarios compared by the study."""

    BIRDS_ONLY = "birds_only"
    FISH_ONLY = "fish_only"
    PENGUIN_ONLY = "penguin_only"
    INTERLEAVED_BIRD_FIRST = "interleaved_bird_first"
    INTERLEAVED_FISH_FIRST = "interleaved_fish_first"


_SCENARIO_RANK = {scenario: rank for rank, scenario in enumerate(Scenario)}


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of the Monte Carlo study; defaults match the headline setup."""

    alpha: float = 0.25
    n: int = 100
    q: int = 6
    m: int = 6
    iterations: int = 5000
    noise_sd: float = 1.0
    feature_sd: float = 1.0
    master_seed: int = DEFAULT_MASTER_SEED
    penguin_mode: PenguinMode = PenguinMode.CONVEX_COMBINATION
    scenarios: tuple[Scenario, ...] = tuple(Scenario)

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.n < 1 or self.q < 1:
            raise ValueError("n and q must be at least 1")
        if self.m < 2 or self.m % 2 != 0:
            raise ValueError(f"m must be even and >= 2, got {self.m}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be at least 1, got {self.iterations}")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be nonnegative, got {self.noise_sd}")
        if self.feature_sd <= 0:
            raise ValueError(f"feature_sd must be positive, got {self.feature_sd}")
        if not self.scenarios:
            raise ValueError("at least one scenario is required")
        object.__setattr__(self, "scenarios", tuple(self.scenarios))

    @property
    def mixture(self) -> MixtureSpec:
        return MixtureSpec(self.alpha)

    @property
    def penguin_rule(self) -> PenguinRule:
        return PenguinRule(self.penguin_mode, self.mixture)


@dataclass(frozen=True)
class StepMetrics:
    """Aggregated bias and MSE for one (scenario, step) cell."""

    scenario: Scenario
    step: int
    mean_bias: float
    se_bias: float
    mean_mse: float
    se_mse: float


@dataclass(frozen=True)
class MonteCarloResult:
    metrics: list[StepMetrics]
    n_failed: int
    n_iterations: int


def bias_metric(psi: np.ndarray, r_p: np.ndarray) -> float:
    """Signed bias: the mean over coordinates of (psi - r_p)."""
    psi = np.asarray(psi, dtype=float)
    r_p = np.asarray(r_p, dtype=float)
    if psi.shape != r_p.shape:
        raise DimensionMismatchError(
            f"psi has shape {psi.shape} but r_p has shape {r_p.shape}"
        )
    return float(np.mean(psi - r_p))


def mse_metric(psi: np.ndarray, penguin_test: list[DataBlock]) -> float:
    """Prediction MSE of psi over test blocks, pooled across all rows.

    Test blocks are expected to be centered already, matching the
    centering applied to training data.
    """
    if not penguin_test:
        raise EmptyInputError("mse_metric needs at least one test block")
    psi = np.asarray(psi, dtype=float)
    sse = 0.0
    rows = 0
    for block in penguin_test:
        if block.n_features != psi.shape[0]:
            raise DimensionMismatchError(
                f"psi has length {psi.shape[0]} but block has "
                f"{block.n_features} columns"
            )
        residual = block.targets - block.features @ psi
        sse += float(residual @ residual)
        rows += block.n_rows
    return sse / rows


def run_scenario(
    scenario: Scenario, data: DatasetBundle, config: ExperimentConfig
) -> list[np.ndarray]:
    """Train one scenario on one iteration's data; returns psi per step.

    Single-population scenarios run the plain recursion on that
    population's m centered blocks with no weighting; interleaved
    scenarios consume the first m/2 blocks of each parent population.
    """
    if scenario is Scenario.BIRDS_ONLY:
        trajectory = run_blocks(center_blocks(data.birds))
    elif scenario is Scenario.FISH_ONLY:
        trajectory = run_blocks(center_blocks(data.fish))
    elif scenario is Scenario.PENGUIN_ONLY:
        trajectory = run_blocks(center_blocks(data.penguin_train))
    else:
        order = (
            InterleaveOrder.BIRD_FIRST
            if scenario is Scenario.INTERLEAVED_BIRD_FIRST
            else InterleaveOrder.FISH_FIRST
        )
        k = config.m // 2
        trajectory = run_interleaved(
            data.birds[:k], data.fish[:k], config.mixture, order=order
        )
    return [state.psi for state in trajectory]


def _iteration_metrics(
    config: ExperimentConfig,
    bird_spec: PopulationSpec,
    fish_spec: PopulationSpec,
    seed_plan: SeedPlan,
    iteration: int,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Bias and MSE arrays of shape (scenarios, m) for one iteration."""
    n_scenarios = len(config.scenarios)
    bias = np.full((n_scenarios, config.m), np.nan)
    mse = np.full((n_scenarios, config.m), np.nan)
    try:
        data = generate_bundle(
            bird_spec, fish_spec, config.penguin_rule,
            config.n, config.m, config.noise_sd, seed_plan, iteration,
        )
        test_blocks = center_blocks(data.penguin_test)
        for s, scenario in enumerate(config.scenarios):
            psis = run_scenario(scenario, data, config)
            for step, psi in enumerate(psis):
                bias[s, step] = bias_metric(psi, data.penguin_weights)
                mse[s, step] = mse_metric(psi, test_blocks)
    except (SingularUpdateError, SingularSystemError):
        return bias, mse, True
    return bias, mse, False


def _run_chunk(args):
    config, bird_spec, fish_spec, seed_plan, start, stop = args
    bias = np.empty((stop - start, len(config.scenarios), config.m))
    mse = np.empty_like(bias)
    failed = np.zeros(stop - start, dtype=bool)
    for offset, iteration in enumerate(range(start, stop)):
        bias[offset], mse[offset], failed[offset] = _iteration_metrics(
            config, bird_spec, fish_spec, seed_plan, iteration
        )
    return start, bias, mse, failed


def _aggregate(
    config: ExperimentConfig,
    bias: np.ndarray,
    mse: np.ndarray,
    failed: np.ndarray,
) -> MonteCarloResult:
    n_iterations = bias.shape[0]
    n_failed = int(failed.sum())
    if n_failed > FAILURE_ABORT_FRACTION * n_iterations:
        raise MonteCarloAbortError(
            f"{n_failed} of {n_iterations} iterations failed, above the "
            f"{FAILURE_ABORT_FRACTION:.0%} abort threshold"
        )
    ok = ~failed
    count = int(ok.sum())
    metrics = []
    order = sorted(range(len(config.scenarios)),
                   key=lambda s: _SCENARIO_RANK[config.scenarios[s]])
    for s in order:
        scenario = config.scenarios[s]
        for step in range(config.m):
            bias_col = bias[ok, s, step]
            mse_col = mse[ok, s, step]
            if count > 1:
                se_bias = float(bias_col.std(ddof=1) / np.sqrt(count))
                se_mse = float(mse_col.std(ddof=1) / np.sqrt(count))
            else:
                se_bias = se_mse = 0.0
            metrics.append(
                StepMetrics(
                    scenario=scenario,
                    step=step + 1,
                    mean_bias=float(bias_col.mean()),
                    se_bias=se_bias,
                    mean_mse=float(mse_col.mean()),
                    se_mse=se_mse,
                )
            )
    return MonteCarloResult(metrics=metrics, n_failed=n_failed,
                            n_iterations=n_iterations)


def run_monte_carlo(config: ExperimentConfig, threads: int = 1) -> MonteCarloResult:
    """Run the full study and aggregate per-(scenario, step) metrics.

    ``threads`` is the number of worker processes; 0 picks the CPU
    count.  Results are bit-identical for any worker count because every
    iteration's data depends only on (master_seed, stream, iteration)
    and the reduction is ordered by iteration index.

    Iterations that fail with a singular update are excluded from the
    aggregates and counted; more than 1% failures aborts with
    ``MonteCarloAbortError``.
    """
    seed_plan = SeedPlan(config.master_seed)
    bird_spec, fish_spec = gen_population_params(
        config.q, seed_plan, config.feature_sd, config.noise_sd
    )
    n = config.iterations
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads == 1:
        _, bias, mse, failed = _run_chunk(
            (config, bird_spec, fish_spec, seed_plan, 0, n)
        )
    else:
        bias = np.empty((n, len(config.scenarios), config.m))
        mse = np.empty_like(bias)
        failed = np.zeros(n, dtype=bool)
        chunk = max(1, -(-n // (threads * 4)))
        tasks = [
            (config, bird_spec, fish_spec, seed_plan, start, min(start + chunk, n))
            for start in range(0, n, chunk)
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for start, chunk_bias, chunk_mse, chunk_failed in pool.map(
                _run_chunk, tasks
            ):
                stop = start + chunk_bias.shape[0]
                bias[start:stop] = chunk_bias
                mse[start:stop] = chunk_mse
                failed[start:stop] = chunk_failed
    return _aggregate(config, bias, mse, failed)


def write_results_csv(result: MonteCarloResult, path) -> Path:
    """Write aggregated metrics as CSV with a fixed header and row order.

    Rows are ordered by scenario (declaration order of ``Scenario``) and
    then by step.  Floats are written with full round-trip precision, so
    equal results produce byte-identical files.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for entry in result.metrics:
            writer.writerow(
                [
                    entry.scenario.value,
                    entry.step,
                    repr(entry.mean_bias),
                    repr(entry.se_bias),
                    repr(entry.mean_mse),
                    repr(entry.se_mse),
                    result.n_failed,
                ]
            )
    return path
