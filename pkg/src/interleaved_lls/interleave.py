"""Interleaved training over two source populations.

Blocks from the two populations (tagged "bird" and "fish") are centered,
scaled by sqrt(alpha) and sqrt(1 - alpha) respectively, and fed to the
recursion in strict alternation.  With that scaling the final estimate is
the minimizer of the alpha-weighted combined least-squares cost, and after
just two steps the estimate already has a closed form, exposed here as
``psi2_closed_form``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .blocks import DataBlock, center_blocks, scale_block
from .exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    EstimationFailedError,
    InvalidScheduleError,
    SingularSystemError,
    SingularUpdateError,
)
from .kernel import FilterState, run_blocks

BIRD = "bird"
FISH = "fish"


@dataclass(frozen=True)
class MixtureSpec:
    """Convex weight tying the blended population to its two sources.

    The endpoints 0 and 1 are accepted but degenerate: one population
    gets weight zero, and an interleaved run fails with
    ``SingularUpdateError`` if that population's block comes first.
    """

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def degenerate(self) -> bool:
        return self.alpha in (0.0, 1.0)


class InterleaveOrder(Enum):
    """Which population contributes the first block."""

    BIRD_FIRST = "bird_first"
    FISH_FIRST = "fish_first"


def interleave_schedule(
    m: int, order: InterleaveOrder = InterleaveOrder.BIRD_FIRST
) -> list[tuple[str, int]]:
    """Alternating schedule of (population tag, 1-based block index) pairs.

    m must be even; the schedule visits k = m/2 blocks of each population,
    alternating populations and advancing the block index every two steps.
    """
    if m < 2 or m % 2 != 0:
        raise InvalidScheduleError(f"schedule length must be even and >= 2, got {m}")
    if order is InterleaveOrder.BIRD_FIRST:
        first, second = BIRD, FISH
    else:
        first, second = FISH, BIRD
    schedule = []
    for index in range(1, m // 2 + 1):
        schedule.append((first, index))
        schedule.append((second, index))
    return schedule


def run_interleaved(
    birds: list[DataBlock],
    fish: list[DataBlock],
    mix: MixtureSpec,
    psi0: np.ndarray | None = None,
    order: InterleaveOrder = InterleaveOrder.BIRD_FIRST,
    *,
    pre_centered: bool = False,
) -> list[FilterState]:
    """Center, scale, and run the alternating recursion.

    Both lists must hold k >= 1 blocks with a common column count; the
    run takes m = 2k steps.  Preprocessing is part of the algorithm:
    every block is centered by its own column means (skipped when
    ``pre_centered`` is set) and then scaled so bird blocks carry weight
    alpha and fish blocks weight 1 - alpha.  Returns the full m-step
    trajectory.
    """
    if not birds or not fish:
        raise EmptyInputError("run_interleaved needs at least one block per population")
    if len(birds) != len(fish):
        raise DimensionMismatchError(
            f"got {len(birds)} bird blocks but {len(fish)} fish blocks"
        )
    if not pre_centered:
        birds = center_blocks(birds)
        fish = center_blocks(fish)
    scaled = {
        BIRD: [scale_block(block, mix.alpha) for block in birds],
        FISH: [scale_block(block, 1.0 - mix.alpha) for block in fish],
    }
    sequence = [
        scaled[tag][index - 1] for tag, index in interleave_schedule(2 * len(birds), order)
    ]
    return run_blocks(sequence, psi0)


def psi2_closed_form(
    U1: np.ndarray,
    b1: np.ndarray,
    V1: np.ndarray,
    f1: np.ndarray,
    mix: MixtureSpec,
) -> np.ndarray:
    """Two-step estimate in closed form, for already-centered first blocks.

    Returns the solution of

        (alpha U1'U1 + (1 - alpha) V1'V1) psi = alpha U1'b1 + (1 - alpha) V1'f1

    which is what two recursion steps produce regardless of which
    population goes first.
    """
    U1 = np.asarray(U1, dtype=float)
    V1 = np.asarray(V1, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    if U1.shape[1] != V1.shape[1]:
        raise DimensionMismatchError(
            f"feature matrices disagree on columns: {U1.shape[1]} vs {V1.shape[1]}"
        )
    if U1.shape[0] != b1.shape[0] or V1.shape[0] != f1.shape[0]:
        raise DimensionMismatchError("target lengths must match feature row counts")
    alpha = mix.alpha
    combined = alpha * (U1.T @ U1) + (1.0 - alpha) * (V1.T @ V1)
    combined = 0.5 * (combined + combined.T)
    rhs = alpha * (U1.T @ b1) + (1.0 - alpha) * (V1.T @ f1)
    try:
        return scipy.linalg.solve(combined, rhs, assume_a="pos")
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "combined two-step Gram matrix is singular or not positive definite"
        ) from exc


def _prediction_mse(blocks: list[DataBlock], psi: np.ndarray) -> float:
    total_rows = sum(block.n_rows for block in blocks)
    sse = 0.0
    for block in blocks:
        residual = block.targets - block.features @ psi
        sse += float(residual @ residual)
    return sse / total_rows


def estimate_alpha(
    birds: list[DataBlock],
    fish: list[DataBlock],
    penguin_validation: list[DataBlock],
    grid_size: int = 101,
) -> float:
    """Grid-search the mixing weight against held-out validation blocks.

    Every candidate on the uniform grid {0, 1/(g-1), ..., 1} is scored by
    the mean squared prediction error of its final interleaved estimate
    on the validation blocks (centered by their own means, matching the
    training-side convention).  Returns the best candidate, breaking
    ties toward the smaller value.

    A candidate whose leading scaled block is singular (alpha 0 or 1, or
    rank-deficient data) is retried with the opposite starting
    population, which leaves the final estimate unchanged; it is skipped
    only if both orders fail.  If every candidate is skipped,
    ``EstimationFailedError`` is raised.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be at least 2, got {grid_size}")
    if not penguin_validation:
        raise EmptyInputError("estimate_alpha needs validation blocks")
    validation = center_blocks(penguin_validation)
    best_alpha = None
    best_score = np.inf
    for candidate in np.linspace(0.0, 1.0, grid_size):
        mix = MixtureSpec(float(candidate))
        trajectory = None
        for order in (InterleaveOrder.BIRD_FIRST, InterleaveOrder.FISH_FIRST):
            try:
                trajectory = run_interleaved(birds, fish, mix, order=order)
                break
            except (SingularUpdateError, SingularSystemError):
                continue
        if trajectory is None:
            continue
        score = _prediction_mse(validation, trajectory[-1].psi)
        if score < best_score:
            best_score = score
            best_alpha = float(candidate)
    if best_alpha is None:
        raise EstimationFailedError(
            "every candidate weight produced a singular interleaved run"
        )
    return best_alpha
