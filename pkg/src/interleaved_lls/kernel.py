"""Block-recursive least squares via the Kalman-filter recursion.

The recursion processes data blocks one at a time.  After each block the
state holds the accumulated Gram matrix H and the current estimate psi:

    H_i   = H_{i-1} + X_i^T X_i
    psi_i = psi_{i-1} + H_i^{-1} X_i^T (y_i - X_i psi_{i-1})

with H_0 = 0 and psi_0 arbitrary (the first update erases it).  Once the
first block's Gram matrix is positive definite, so is every later H, and
the final psi equals the batch least-squares solution over all blocks.
``batch_lls`` provides that solution independently as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .blocks import DataBlock
from .exceptions import (
    DimensionMismatchError,
    EmptyInputError,
    SingularSystemError,
    SingularUpdateError,
)

# A factorization pivot at or below this fraction of the largest pivot is
# treated as singular.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class FilterState:
    """Recursion state: Gram matrix H (q, q), estimate psi (q,), step count.

    Treat instances as immutable; every operation returns a new state.
    """

    H: np.ndarray
    psi: np.ndarray
    steps_taken: int


def init_state(q: int, psi0: np.ndarray | None = None) -> FilterState:
    """Fresh state with H = 0 and the given (or zero) initial estimate."""
    if q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    if psi0 is None:
        psi = np.zeros(q)
    else:
        psi = np.array(psi0, dtype=float, ndmin=1)
        if psi.shape != (q,):
            raise DimensionMismatchError(
                f"psi0 must have length {q}, got shape {psi.shape}"
            )
        if not np.isfinite(psi).all():
            raise ValueError("psi0 must be finite")
    return FilterState(H=np.zeros((q, q)), psi=psi, steps_taken=0)


def _solve_spd(matrix: np.ndarray, rhs: np.ndarray, step: int) -> np.ndarray:
    """Cholesky solve with a relative pivot threshold; never forms an inverse."""
    try:
        factor = scipy.linalg.cho_factor(matrix, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularUpdateError(
            step, f"Gram matrix at step {step} is not positive definite"
        ) from exc
    pivots = np.diag(factor[0]) ** 2
    if pivots.min() <= PIVOT_RTOL * pivots.max():
        raise SingularUpdateError(
            step,
            f"Gram matrix at step {step} is numerically singular "
            f"(pivot ratio {pivots.min() / pivots.max():.3e})",
        )
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def kf_step(state: FilterState, block: DataBlock) -> FilterState:
    """Advance the recursion by one data block."""
    q = state.psi.shape[0]
    if block.n_features != q:
        raise DimensionMismatchError(
            f"block has {block.n_features} feature columns, state expects {q}"
        )
    X = block.features
    gram = X.T @ X
    gram = 0.5 * (gram + gram.T)  # keep H symmetric to rounding
    H = state.H + gram
    step = state.steps_taken + 1
    residual = block.targets - X @ state.psi
    psi = state.psi + _solve_spd(H, X.T @ residual, step)
    return FilterState(H=H, psi=psi, steps_taken=step)


def run_blocks(
    blocks: list[DataBlock], psi0: np.ndarray | None = None
) -> list[FilterState]:
    """Run the recursion over an ordered block sequence.

    Returns the full trajectory: entry i is the state after processing
    blocks[0..i].  The first block's Gram matrix must be positive
    definite or the first step raises ``SingularUpdateError``.
    """
    if not blocks:
        raise EmptyInputError("run_blocks needs at least one data block")
    state = init_state(blocks[0].n_features, psi0)
    trajectory = []
    for block in blocks:
        state = kf_step(state, block)
        trajectory.append(state)
    return trajectory


def batch_lls(blocks: list[DataBlock]) -> np.ndarray:
    """Solve the stacked normal equations directly.

    This is the batch oracle the recursion is checked against: it
    accumulates sum(X_i^T X_i) and sum(X_i^T y_i) over all blocks and
    solves the dense symmetric system in one shot, independent of the
    recursion code path.
    """
    if not blocks:
        raise EmptyInputError("batch_lls needs at least one data block")
    q = blocks[0].n_features
    normal = np.zeros((q, q))
    rhs = np.zeros(q)
    for block in blocks:
        if block.n_features != q:
            raise DimensionMismatchError(
                f"all blocks must have {q} feature columns, got {block.n_features}"
            )
        normal += block.features.T @ block.features
        rhs += block.features.T @ block.targets
    normal = 0.5 * (normal + normal.T)
    try:
        return scipy.linalg.solve(normal, rhs, assume_a="pos")
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "stacked normal matrix is singular or not positive definite"
        ) from exc


def cost(blocks: list[DataBlock], r: np.ndarray) -> float:
    """Sum of squared residual norms over all blocks at parameter vector r."""
    r = np.asarray(r, dtype=float)
    total = 0.0
    for block in blocks:
        if block.n_features != r.shape[0]:
            raise DimensionMismatchError(
                f"r has length {r.shape[0]} but block has {block.n_features} columns"
            )
        residual = block.targets - block.features @ r
        total += float(residual @ residual)
    return total
