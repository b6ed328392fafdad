"""Seeded synthetic data for two source populations and their blend.

Generation is driven by a ``SeedPlan``: every random stream is keyed by
(master seed, stream label, iteration), so datasets are bit-identical no
matter how many threads generate them or in what order.

The blended "penguin" population derives from bird and fish blocks either
as a rowwise convex combination of the feature matrices or by sampling
each row from one parent, and its weight vector is always the convex
combination of the parent weight vectors.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .blocks import DataBlock
from .exceptions import DimensionMismatchError
from .interleave import MixtureSpec

#: Stream label -> fixed key used in seed derivation.  The numbering is
#: part of the reproducibility contract; never reorder or reuse keys.
STREAMS = {
    "params": 0,
    "bird_train": 1,
    "fish_train": 2,
    "penguin_train": 3,
    "bird_test": 4,
    "fish_test": 5,
    "penguin_test": 6,
    "check": 7,
}


@dataclass(frozen=True)
class SeedPlan:
    """Derives independent random streams from a single master seed.

    Uses the counter-based Philox bit generator keyed through
    ``numpy.random.SeedSequence(master_seed, spawn_key=(stream, iteration))``,
    so any (stream, iteration) pair can be generated on any worker in any
    order and still produce the same bits.
    """

    master_seed: int

    def generator(self, stream: str, iteration: int = 0) -> np.random.Generator:
        if stream not in STREAMS:
            raise KeyError(f"unknown stream label {stream!r}")
        if iteration < 0:
            raise ValueError(f"iteration must be nonnegative, got {iteration}")
        seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(STREAMS[stream], iteration)
        )
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class PopulationSpec:
    """Ground truth for one population.

    ``weights`` is the true coefficient vector; feature rows are drawn
    from a normal with constant mean ``feature_mean`` in every coordinate
    and isotropic standard deviation ``feature_sd``; targets get additive
    Gaussian noise with standard deviation ``noise_sd``.
    """

    weights: np.ndarray
    feature_mean: float = 0.0
    feature_sd: float = 1.0
    noise_sd: float = 1.0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float, ndmin=1)
        if weights.ndim != 1 or weights.shape[0] < 1:
            raise DimensionMismatchError("weights must be a nonempty vector")
        if not np.isfinite(weights).all():
            raise ValueError("weights must be finite")
        if not self.feature_sd > 0:
            raise ValueError(f"feature_sd must be positive, got {self.feature_sd}")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be nonnegative, got {self.noise_sd}")
        object.__setattr__(self, "weights", weights)

    @property
    def q(self) -> int:
        return self.weights.shape[0]


class PenguinMode(Enum):
    """How blended feature matrices derive from their parents."""

    CONVEX_COMBINATION = "convex"
    DISTRIBUTION_MIXTURE = "mixture"


@dataclass(frozen=True)
class PenguinRule:
    mode: PenguinMode
    mix: MixtureSpec


def gen_population_params(
    q: int,
    seed: SeedPlan,
    feature_sd: float = 1.0,
    noise_sd: float = 1.0,
) -> tuple[PopulationSpec, PopulationSpec]:
    """Draw the fixed ground truth for the bird and fish populations.

    Weight elements are iid Uniform(-5, 5); each population's scalar
    feature mean is Uniform(-10, 10).  The draw comes from the dedicated
    "params" stream, so it is independent of iteration data and stays
    fixed when the same plan generates many iterations.
    """
    if q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    rng = seed.generator("params")
    bird_weights = rng.uniform(-5.0, 5.0, q)
    fish_weights = rng.uniform(-5.0, 5.0, q)
    bird_mean = float(rng.uniform(-10.0, 10.0))
    fish_mean = float(rng.uniform(-10.0, 10.0))
    bird = PopulationSpec(bird_weights, bird_mean, feature_sd, noise_sd)
    fish = PopulationSpec(fish_weights, fish_mean, feature_sd, noise_sd)
    return bird, fish


def gen_blocks(
    spec: PopulationSpec,
    n: int,
    q: int,
    m_blocks: int,
    seed: SeedPlan,
    iteration: int,
    stream: str,
) -> list[DataBlock]:
    """Generate m_blocks independent (n, q) blocks for one population.

    Feature rows are N(feature_mean * 1, feature_sd^2 * I); targets are
    features @ weights plus iid N(0, noise_sd^2) noise.  Deterministic
    given (seed plan, stream, iteration).
    """
    if n < 1 or q < 1 or m_blocks < 1:
        raise ValueError("n, q, and m_blocks must all be at least 1")
    if q != spec.q:
        raise DimensionMismatchError(
            f"spec has {spec.q} weights but q={q} was requested"
        )
    rng = seed.generator(stream, iteration)
    blocks = []
    for _ in range(m_blocks):
        features = spec.feature_mean + spec.feature_sd * rng.standard_normal((n, q))
        noise = spec.noise_sd * rng.standard_normal(n)
        targets = features @ spec.weights + noise
        blocks.append(DataBlock(targets, features))
    return blocks


def gen_penguin(
    birds: list[DataBlock],
    fish: list[DataBlock],
    bird_spec: PopulationSpec,
    fish_spec: PopulationSpec,
    rule: PenguinRule,
    noise_sd: float,
    seed: SeedPlan,
    iteration: int,
    stream: str = "penguin_train",
) -> tuple[list[DataBlock], np.ndarray]:
    """Derive blended blocks from parent blocks, plus the blended weights.

    Convex-combination mode forms each feature matrix as
    alpha * U + (1 - alpha) * V; mixture mode copies each row from U with
    probability alpha and from V otherwise.  Either way the true weight
    vector is alpha * r_bird + (1 - alpha) * r_fish, and targets get
    fresh N(0, noise_sd^2) noise.
    """
    if len(birds) != len(fish):
        raise DimensionMismatchError(
            f"got {len(birds)} bird blocks but {len(fish)} fish blocks"
        )
    if bird_spec.q != fish_spec.q:
        raise DimensionMismatchError("bird and fish specs disagree on q")
    alpha = rule.mix.alpha
    r_p = alpha * bird_spec.weights + (1.0 - alpha) * fish_spec.weights
    rng = seed.generator(stream, iteration)
    blocks = []
    for U, V in zip(birds, fish):
        if U.features.shape != V.features.shape:
            raise DimensionMismatchError(
                f"parent blocks disagree on shape: {U.features.shape} vs "
                f"{V.features.shape}"
            )
        if rule.mode is PenguinMode.CONVEX_COMBINATION:
            Z = alpha * U.features + (1.0 - alpha) * V.features
        else:
            from_bird = rng.random(U.n_rows) < alpha
            Z = np.where(from_bird[:, None], U.features, V.features)
        noise = noise_sd * rng.standard_normal(U.n_rows)
        blocks.append(DataBlock(Z @ r_p + noise, Z))
    return blocks, r_p


@dataclass(frozen=True)
class DatasetBundle:
    """One iteration's worth of data: parents, blended train and test sets."""

    birds: list[DataBlock]
    fish: list[DataBlock]
    penguin_train: list[DataBlock]
    penguin_test: list[DataBlock]
    penguin_weights: np.ndarray


def generate_bundle(
    bird_spec: PopulationSpec,
    fish_spec: PopulationSpec,
    rule: PenguinRule,
    n: int,
    m: int,
    noise_sd: float,
    seed: SeedPlan,
    iteration: int,
) -> DatasetBundle:
    """Generate the full train/test bundle for one iteration.

    The test-side penguin blocks derive from a fresh, held-out draw of
    parent blocks (same shapes as training) so evaluation never reuses
    training rows.
    """
    q = bird_spec.q
    birds = gen_blocks(bird_spec, n, q, m, seed, iteration, "bird_train")
    fish = gen_blocks(fish_spec, n, q, m, seed, iteration, "fish_train")
    penguin_train, r_p = gen_penguin(
        birds, fish, bird_spec, fish_spec, rule, noise_sd, seed, iteration,
        stream="penguin_train",
    )
    birds_test = gen_blocks(bird_spec, n, q, m, seed, iteration, "bird_test")
    fish_test = gen_blocks(fish_spec, n, q, m, seed, iteration, "fish_test")
    penguin_test, _ = gen_penguin(
        birds_test, fish_test, bird_spec, fish_spec, rule, noise_sd, seed, iteration,
        stream="penguin_test",
    )
    return DatasetBundle(birds, fish, penguin_train, penguin_test, r_p)


# ---------------------------------------------------------------------------
# Dataset export / import
# ---------------------------------------------------------------------------

_FAMILIES = ("bird", "fish", "penguin_train", "penguin_test")


def _write_block_csv(path: Path, block: DataBlock) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["target"] + [f"x{j}" for j in range(1, block.n_features + 1)])
        for y, row in zip(block.targets, block.features):
            writer.writerow([repr(float(y))] + [repr(float(v)) for v in row])


def _read_block_csv(path: Path) -> DataBlock:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "target":
            raise ValueError(f"{path} is not a block CSV (header {header!r})")
        rows = [[float(v) for v in row] for row in reader]
    data = np.asarray(rows, dtype=float)
    return DataBlock(targets=data[:, 0], features=data[:, 1:])


def export_dataset(out_dir, bundle: DatasetBundle, manifest: dict) -> Path:
    """Write one bundle as a directory of per-block CSVs plus manifest.json.

    Files are named bird_1.csv .. bird_m.csv and likewise for fish,
    penguin_train, and penguin_test.  Block CSVs carry a ``target``
    column followed by x1..xq, full round-trip float precision, no index
    column.  Output bytes are a pure function of the bundle and manifest.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest["penguin_weights"] = [float(v) for v in bundle.penguin_weights]
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for family in _FAMILIES:
        blocks = getattr(bundle, "birds" if family == "bird" else family)
        for i, block in enumerate(blocks, start=1):
            _write_block_csv(out / f"{family}_{i}.csv", block)
    return out


def load_dataset(directory) -> tuple[dict, DatasetBundle]:
    """Read back a directory written by ``export_dataset``."""
    directory = Path(directory)
    with open(directory / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    families = {}
    for family in _FAMILIES:
        blocks = []
        index = 1
        while (path := directory / f"{family}_{index}.csv").exists():
            blocks.append(_read_block_csv(path))
            index += 1
        if not blocks:
            raise FileNotFoundError(f"no {family}_*.csv files in {directory}")
        families[family] = blocks
    bundle = DatasetBundle(
        birds=families["bird"],
        fish=families["fish"],
        penguin_train=families["penguin_train"],
        penguin_test=families["penguin_test"],
        penguin_weights=np.asarray(manifest["penguin_weights"], dtype=float),
    )
    return manifest, bundle
