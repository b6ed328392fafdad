"""Block-recursive least squares with interleaved two-population training.

The package has four layers: the recursion kernel and its batch oracle
(``kernel``), interleaved preprocessing and training (``interleave``),
seeded synthetic-data generation (``synthdata``), and the Monte Carlo
bias/MSE study (``experiment``).  ``checks`` holds randomized self-checks
and ``cli`` the command-line front end.
"""

from .blocks import DataBlock, center_block, center_blocks, scale_block
from .checks import CheckResult, two_step_identity_check, two_step_unbiasedness_check
from .exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    EstimationFailedError,
    InvalidScheduleError,
    MonteCarloAbortError,
    SingularSystemError,
    SingularUpdateError,
)
from .experiment import (
    ExperimentConfig,
    MonteCarloResult,
    Scenario,
    StepMetrics,
    bias_metric,
    mse_metric,
    run_monte_carlo,
    run_scenario,
    write_results_csv,
)
from .interleave import (
    InterleaveOrder,
    MixtureSpec,
    estimate_alpha,
    interleave_schedule,
    psi2_closed_form,
    run_interleaved,
)
from .kernel import FilterState, batch_lls, cost, init_state, kf_step, run_blocks
from .synthdata import (
    DatasetBundle,
    PenguinMode,
    PenguinRule,
    PopulationSpec,
    SeedPlan,
    export_dataset,
    gen_blocks,
    gen_penguin,
    gen_population_params,
    generate_bundle,
    load_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "DataBlock",
    "DatasetBundle",
    "DimensionMismatchError",
    "EmptyInputError",
    "EstimationFailedError",
    "ExperimentConfig",
    "FilterState",
    "InterleaveOrder",
    "InvalidScheduleError",
    "MixtureSpec",
    "MonteCarloAbortError",
    "MonteCarloResult",
    "PenguinMode",
    "PenguinRule",
    "PopulationSpec",
    "Scenario",
    "SeedPlan",
    "SingularSystemError",
    "SingularUpdateError",
    "StepMetrics",
    "batch_lls",
    "bias_metric",
    "center_block",
    "center_blocks",
    "cost",
    "estimate_alpha",
    "export_dataset",
    "gen_blocks",
    "gen_penguin",
    "gen_population_params",
    "generate_bundle",
    "init_state",
    "interleave_schedule",
    "kf_step",
    "load_dataset",
    "mse_metric",
    "psi2_closed_form",
    "run_blocks",
    "run_interleaved",
    "run_monte_carlo",
    "run_scenario",
    "scale_block",
    "two_step_identity_check",
    "two_step_unbiasedness_check",
    "write_results_csv",
]
