"""Command-line front end.

Subcommands:
  generate        write one iteration's synthetic datasets as CSV + manifest
  run             run the Monte Carlo study, write results CSV (and SVG charts)
  check-lemmas    run the randomized two-step self-checks
  estimate-alpha  grid-search the mixing weight over an exported dataset

Configuration comes from an optional JSON file (every key optional, defaults
match the headline experiment); command-line flags override file values.

Exit codes: 0 success, 1 check failure, 2 config error, 3 I/O error,
4 runtime abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checks import two_step_identity_check, two_step_unbiasedness_check
from .exceptions import EstimationFailedError, MonteCarloAbortError
from .experiment import (
    ExperimentConfig,
    MonteCarloResult,
    Scenario,
    run_monte_carlo,
    write_results_csv,
)
from .interleave import estimate_alpha
from .svgchart import render_line_chart
from .synthdata import (
    PenguinMode,
    SeedPlan,
    export_dataset,
    gen_population_params,
    generate_bundle,
    load_dataset,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_ABORT = 4

_CONFIG_KEYS = {
    "alpha",
    "n",
    "q",
    "m",
    "iterations",
    "noise_sd",
    "feature_sd",
    "master_seed",
    "penguin_mode",
    "scenarios",
    "threads",
    "format",
    "out",
}
_INT_KEYS = ("n", "q", "m", "iterations", "master_seed")
_FLOAT_KEYS = ("alpha", "noise_sd", "feature_sd")
_FORMATS = ("csv", "svg", "both")


class ConfigError(Exception):
    """Invalid configuration file or values."""


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = sorted(set(raw) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return raw


def _build_config(args) -> tuple[ExperimentConfig, dict]:
    """Merge defaults, config file, and flag overrides; returns (config, extras)."""
    raw = _load_config_file(args.config) if args.config else {}
    extras = {
        "threads": raw.pop("threads", 0),
        "format": raw.pop("format", "csv"),
        "out": raw.pop("out", None),
    }
    if getattr(args, "seed", None) is not None:
        raw["master_seed"] = args.seed
    if getattr(args, "iterations", None) is not None:
        raw["iterations"] = args.iterations
    for key in _INT_KEYS:
        if key in raw and not isinstance(raw[key], int):
            raise ConfigError(f"config key {key!r} must be an integer")
    for key in _FLOAT_KEYS:
        if key in raw and not isinstance(raw[key], (int, float)):
            raise ConfigError(f"config key {key!r} must be a number")
    if "penguin_mode" in raw:
        try:
            raw["penguin_mode"] = PenguinMode(raw["penguin_mode"])
        except ValueError as exc:
            raise ConfigError(f"unknown penguin_mode {raw['penguin_mode']!r}") from exc
    if "scenarios" in raw:
        try:
            raw["scenarios"] = tuple(Scenario(name) for name in raw["scenarios"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad scenarios list: {exc}") from exc
    try:
        config = ExperimentConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if getattr(args, "threads", None) is not None:
        extras["threads"] = args.threads
    if getattr(args, "out", None) is not None:
        extras["out"] = args.out
    if getattr(args, "format", None) is not None:
        extras["format"] = args.format
    if not isinstance(extras["threads"], int) or extras["threads"] < 0:
        raise ConfigError("threads must be a nonnegative integer (0 = auto)")
    if extras["format"] not in _FORMATS:
        raise ConfigError(f"format must be one of {_FORMATS}")
    return config, extras


def _cmd_generate(args) -> int:
    config, extras = _build_config(args)
    out_dir = extras["out"] or "dataset"
    seed_plan = SeedPlan(config.master_seed)
    bird_spec, fish_spec = gen_population_params(
        config.q, seed_plan, config.feature_sd, config.noise_sd
    )
    bundle = generate_bundle(
        bird_spec, fish_spec, config.penguin_rule,
        config.n, config.m, config.noise_sd, seed_plan, iteration=0,
    )
    manifest = {
        "alpha": config.alpha,
        "n": config.n,
        "q": config.q,
        "m": config.m,
        "penguin_mode": config.penguin_mode.value,
        "master_seed": config.master_seed,
        "iteration": 0,
        "noise_sd": config.noise_sd,
        "feature_sd": config.feature_sd,
        "bird_weights": [float(v) for v in bird_spec.weights],
        "fish_weights": [float(v) for v in fish_spec.weights],
        "bird_feature_mean": bird_spec.feature_mean,
        "fish_feature_mean": fish_spec.feature_mean,
    }
    export_dataset(out_dir, bundle, manifest)
    print(f"wrote dataset to {out_dir}")
    return EXIT_OK


def _metric_curves(result: MonteCarloResult, field: str):
    curves = []
    for scenario in Scenario:
        points = [
            (entry.step, getattr(entry, field))
            for entry in result.metrics
            if entry.scenario is scenario
        ]
        if points:
            curves.append((scenario.value, points))
    return curves


def _cmd_run(args) -> int:
    config, extras = _build_config(args)
    out = Path(extras["out"] or "results.csv")
    result = run_monte_carlo(config, threads=extras["threads"])
    write_results_csv(result, out)
    written = [str(out)]
    if extras["format"] in ("svg", "both"):
        stem = out.stem if out.suffix else out.name
        for field, label in (("mean_bias", "bias"), ("mean_mse", "MSE")):
            chart = render_line_chart(
                _metric_curves(result, field),
                title=f"{label} by training step "
                f"({result.n_iterations} iterations, alpha={config.alpha:g})",
                y_label=label,
            )
            svg_path = out.with_name(f"{stem}_{label.lower()}.svg")
            svg_path.write_text(chart, encoding="utf-8")
            written.append(str(svg_path))
    print(f"wrote {', '.join(written)} ({result.n_failed} failed iterations)")
    return EXIT_OK


def _cmd_check_lemmas(args) -> int:
    feature_sd = [float(v) for v in args.feature_sd.split(",")]
    sd = feature_sd[0] if len(feature_sd) == 1 else feature_sd
    results = [
        two_step_identity_check(trials=args.trials, seed=args.seed or 0),
        two_step_unbiasedness_check(
            iterations=args.iterations or 5000,
            seed=args.seed or 0,
            feature_sd=sd,
        ),
    ]
    for result in results:
        print(f"{result.status} {result.name}: {result.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def _cmd_estimate_alpha(args) -> int:
    _, bundle = load_dataset(args.dataset_dir)
    value = estimate_alpha(
        bundle.birds, bundle.fish, bundle.penguin_test, grid_size=args.grid_size
    )
    print(f"{value:.10g}")
    return EXIT_OK


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (all keys optional)")
    parser.add_argument("--seed", type=int, help="override master_seed")
    parser.add_argument("--iterations", type=int, help="override iteration count")
    parser.add_argument("--threads", type=int, help="worker count, 0 = auto")
    parser.add_argument("--out", help="output path (directory for generate)")
    parser.add_argument("--format", choices=_FORMATS, help="outputs to write")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interleaved-lls",
        description="Interleaved block least squares: data generation, "
        "Monte Carlo study, and self-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write one iteration's datasets")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("run", help="run the Monte Carlo study")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_run)

    p = sub.add_parser("check-lemmas", help="run the two-step self-checks")
    _add_common_flags(p)
    p.add_argument("--trials", type=int, default=100,
                   help="random instances for the identity check")
    p.add_argument("--feature-sd", default="1",
                   help="per-coordinate feature sd for the unbiasedness check, "
                   "comma separated (non-constant values skip the check)")
    p.set_defaults(handler=_cmd_check_lemmas)

    p = sub.add_parser("estimate-alpha",
                       help="grid-search the mixing weight over a dataset directory")
    _add_common_flags(p)
    p.add_argument("dataset_dir", help="directory written by the generate command")
    p.add_argument("--grid-size", type=int, default=101,
                   help="number of grid points on [0, 1]")
    p.set_defaults(handler=_cmd_estimate_alpha)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MonteCarloAbortError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except EstimationFailedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
