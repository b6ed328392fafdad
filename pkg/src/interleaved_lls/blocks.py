"""Data blocks and block-level transforms.

A data block is one (target vector, feature matrix) pair, the unit of work
consumed by a single recursion step.  Blocks are value objects: construction
copies and validates the arrays, and every transform returns new blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError


@dataclass(frozen=True)
class DataBlock:
    """Targets of shape (n,) paired with features of shape (n, q)."""

    targets: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        targets = np.array(self.targets, dtype=float, ndmin=1)
        features = np.array(self.features, dtype=float)
        if targets.ndim != 1:
            raise DimensionMismatchError(
                f"targets must be a vector, got shape {targets.shape}"
            )
        if features.ndim != 2:
            raise DimensionMismatchError(
                f"features must be a matrix, got shape {features.shape}"
            )
        if features.shape[0] != targets.shape[0]:
            raise DimensionMismatchError(
                f"targets have {targets.shape[0]} rows but features have "
                f"{features.shape[0]}"
            )
        if targets.shape[0] < 1:
            raise ValueError("a data block needs at least one row")
        if features.shape[1] < 1:
            raise ValueError("a data block needs at least one feature column")
        if not np.isfinite(targets).all() or not np.isfinite(features).all():
            raise ValueError("data blocks must not contain NaN or Inf entries")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "features", features)

    @property
    def n_rows(self) -> int:
        return self.targets.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def center_block(block: DataBlock) -> DataBlock:
    """Subtract the block's own column means from features and targets."""
    return DataBlock(
        targets=block.targets - block.targets.mean(),
        features=block.features - block.features.mean(axis=0),
    )


def center_blocks(blocks: list[DataBlock]) -> list[DataBlock]:
    """Center every block individually by its own column means.

    Centering is per block: each block's target vector and each of its
    feature columns end up with mean zero.  Idempotent up to rounding.
    """
    return [center_block(block) for block in blocks]


def scale_block(block: DataBlock, weight: float) -> DataBlock:
    """Multiply all entries of a block by sqrt(weight).

    The square root makes the block's Gram matrix and cross-moment scale
    by exactly ``weight``, which is how a convex weight enters the
    normal equations.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {weight}")
    factor = math.sqrt(weight)
    return DataBlock(targets=factor * block.targets, features=factor * block.features)
