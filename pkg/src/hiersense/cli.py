"""Command-line entry point.

Subcommands: ``sweep`` runs the blockage sweep and writes the CSV, ``tree``
builds and prints a hierarchy, ``bound`` evaluates the full-information
benchmark for one instance, and ``validate`` runs the built-in oracle suites.
Flags may also be supplied through a key=value config file; explicit flags
win. Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .analysis import full_info_upper_bound_exact, full_info_upper_bound_mc
from .decision import RewardParams
from .experiment import ExperimentConfig, run_sweep
from .hierarchy import build_greedy_tree, build_regular_tree, format_tree
from .interference import (
    BlockageLayout,
    GridTopology,
    build_interference_matrix,
    format_layout,
    parse_layout,
    sample_blockage,
)
from .occupancy import MarkovParams, steady_state_probability
from .oracles import run_average_reward_suite, run_belief_suite

JOBS_ENV_VAR = "HIERSENSE_JOBS"

# reference study settings; every flag documents its default
DEFAULTS = {
    "rows": 4,
    "cols": 4,
    "p": 0.1,
    "q": 0.1,
    "rho_i": 1.0,
    "rho_b": 0.0,
    "lambda": 1.0,
    "alpha": 2.0,
    "p_block": "0:1:0.1",
    "trials": 200,
    "slots": 200_000,
    "tree": "both",
    "eval": "closed-form",
    "bound": "exact",
    "mc_samples": 5000,
    "blockage": "los",
    "seed": 0,
    "jobs": None,  # resolved from the environment at runtime
}


def parse_p_block_list(text: str) -> tuple[float, ...]:
    """Parse a sweep list: 'a:b:step' (inclusive), comma list, or one value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"range step must be positive, got {step}")
        count = math.floor((stop - start) / step + 1e-9) + 1
        values = tuple(round(start + k * step, 12) for k in range(max(count, 0)))
    elif "," in text:
        values = tuple(round(float(p), 12) for p in text.split(","))
    else:
        values = (round(float(text), 12),)
    if not values:
        raise ValueError(f"empty blockage-probability list: {text!r}")
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"blockage probability {v} outside [0, 1]")
    return values


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args: argparse.Namespace, key: str, cast):
    """Flag value if given, else config-file value, else documented default."""
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    file_values = getattr(args, "_config_values", {})
    if key in file_values:
        return cast(file_values[key])
    return DEFAULTS[key]


def _add_instance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rows", type=int, help=f"grid rows (default {DEFAULTS['rows']})")
    parser.add_argument("--cols", type=int, help=f"grid columns (default {DEFAULTS['cols']})")
    parser.add_argument("--p", type=float, help=f"idle-to-occupied probability (default {DEFAULTS['p']})")
    parser.add_argument("--q", type=float, help=f"occupied-to-idle probability (default {DEFAULTS['q']})")
    parser.add_argument("--rho-i", dest="rho_i", type=float, help=f"idle-cell throughput (default {DEFAULTS['rho_i']})")
    parser.add_argument("--rho-b", dest="rho_b", type=float, help=f"busy-cell throughput (default {DEFAULTS['rho_b']})")
    parser.add_argument("--lambda", dest="lambda_", type=float, help=f"interference weight (default {DEFAULTS['lambda']})")
    parser.add_argument("--alpha", type=float, help=f"pathloss exponent (default {DEFAULTS['alpha']})")
    parser.add_argument(
        "--blockage",
        choices=("los", "adjacent"),
        help=f"blockage semantics (default {DEFAULTS['blockage']})",
    )
    parser.add_argument("--seed", type=int, help=f"master seed (default {DEFAULTS['seed']})")
    parser.add_argument("--config", help="key=value file supplying any of these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiersense",
        description="Multi-scale spectrum sensing: trees, rewards, blockage sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run the blockage sweep and write a CSV")
    _add_instance_flags(sweep)
    sweep.add_argument("--p-block", dest="p_block", help=f"values as a:b:step or comma list (default {DEFAULTS['p_block']})")
    sweep.add_argument("--trials", type=int, help=f"trials per sweep point (default {DEFAULTS['trials']})")
    sweep.add_argument("--slots", type=int, help=f"slots for --eval simulate (default {DEFAULTS['slots']})")
    sweep.add_argument("--tree", choices=("regular", "greedy", "both"), help=f"tree scheme(s) (default {DEFAULTS['tree']})")
    sweep.add_argument("--eval", dest="eval_mode", choices=("closed-form", "simulate"), help=f"per-trial evaluation (default {DEFAULTS['eval']})")
    sweep.add_argument("--bound", choices=("exact", "mc"), help=f"benchmark mode (default {DEFAULTS['bound']})")
    sweep.add_argument("--mc-samples", dest="mc_samples", type=int, help=f"samples for --bound mc (default {DEFAULTS['mc_samples']})")
    sweep.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV_VAR} or 1)")
    sweep.add_argument("--out", required=True, help="output CSV path")

    tree = sub.add_parser("tree", help="build a hierarchy and print it")
    _add_instance_flags(tree)
    tree.add_argument("--tree", choices=("regular", "greedy"), default="greedy", help="builder (default greedy)")
    tree.add_argument("--p-block", dest="p_block", help="blockage probability for a sampled layout (default 0)")
    tree.add_argument("--layout-in", dest="layout_in", help="read the wall layout from this file instead of sampling")
    tree.add_argument("--layout-out", dest="layout_out", help="also write the layout used to this file")

    bound = sub.add_parser("bound", help="full-information benchmark for one instance")
    _add_instance_flags(bound)
    bound.add_argument("--p-block", dest="p_block", help="blockage probability for a sampled layout (default 0)")
    bound.add_argument("--layout-in", dest="layout_in", help="read the wall layout from this file instead of sampling")
    bound.add_argument("--mode", choices=("exact", "mc"), default="exact", help="evaluation mode (default exact)")
    bound.add_argument("--samples", type=int, help=f"samples for --mode mc (default {DEFAULTS['mc_samples']})")

    validate = sub.add_parser("validate", help="run the oracle validation suites")
    validate.add_argument(
        "--suite",
        choices=("belief", "average-reward", "all"),
        default="all",
        help="belief: closed-form posterior vs. enumeration and exact filter; "
        "average-reward: closed-form long-run reward vs. slot simulation",
    )
    validate.add_argument("--seed", type=int, help=f"master seed (default {DEFAULTS['seed']})")

    return parser


def _load_common(args: argparse.Namespace):
    args._config_values = _read_config_file(args.config) if getattr(args, "config", None) else {}
    rows = _resolve(args, "rows", int)
    cols = _resolve(args, "cols", int)
    markov = MarkovParams(_resolve(args, "p", float), _resolve(args, "q", float))
    lambda_ = getattr(args, "lambda_", None)
    if lambda_ is None:
        lambda_ = float(args._config_values.get("lambda", DEFAULTS["lambda"]))
    rewards = RewardParams(
        rho_idle=_resolve(args, "rho_i", float),
        rho_busy=_resolve(args, "rho_b", float),
        interference_weight=lambda_,
    )
    alpha = _resolve(args, "alpha", float)
    blockage = _resolve(args, "blockage", str)
    seed = _resolve(args, "seed", int)
    return rows, cols, markov, rewards, alpha, blockage, seed


def _instance_phi(args, rows, cols, alpha, blockage, seed):
    """Layout (from file or sampled) and its interference matrix."""
    topology = GridTopology(rows, cols)
    if getattr(args, "layout_in", None):
        with open(args.layout_in, encoding="utf-8") as handle:
            layout = parse_layout(handle.read(), topology)
    else:
        p_block = float(getattr(args, "p_block", None) or 0.0)
        if not 0.0 <= p_block <= 1.0:
            raise ValueError(f"blockage probability {p_block} outside [0, 1]")
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0, 0)))
        layout = sample_blockage(topology, p_block, rng)
    return topology, layout, build_interference_matrix(topology, layout, alpha, blockage)


def _cmd_sweep(args: argparse.Namespace) -> int:
    rows, cols, markov, rewards, alpha, blockage, seed = _load_common(args)
    scheme_flag = _resolve(args, "tree", str)
    schemes = ("regular", "greedy") if scheme_flag == "both" else (scheme_flag,)
    eval_flag = getattr(args, "eval_mode", None) or args._config_values.get("eval", DEFAULTS["eval"])
    config = ExperimentConfig(
        rows=rows,
        cols=cols,
        markov=markov,
        rewards=rewards,
        alpha=alpha,
        p_block_values=parse_p_block_list(str(_resolve(args, "p_block", str))),
        trials=_resolve(args, "trials", int),
        slots=_resolve(args, "slots", int),
        schemes=schemes,
        eval_mode=eval_flag.replace("-", "_"),
        bound_mode=_resolve(args, "bound", str),
        mc_samples=_resolve(args, "mc_samples", int),
        blockage_semantics=blockage,
        seed=seed,
    )
    jobs = getattr(args, "jobs", None)
    if jobs is None:
        jobs = int(args._config_values.get("jobs", os.environ.get(JOBS_ENV_VAR, "1")))
    result = run_sweep(config, jobs=jobs)
    with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(result.to_csv())
    print(f"wrote {len(config.p_block_values) * len(config.result_schemes)} data rows to {args.out}")
    return 0


def _cmd_tree(args: argparse.Namespace) -> int:
    rows, cols, _, _, alpha, blockage, seed = _load_common(args)
    topology, layout, phi = _instance_phi(args, rows, cols, alpha, blockage, seed)
    builder = args.tree
    tree = build_regular_tree(topology) if builder == "regular" else build_greedy_tree(phi)
    if getattr(args, "layout_out", None):
        with open(args.layout_out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(format_layout(layout) + "\n")
    print(format_tree(tree))
    return 0


def _cmd_bound(args: argparse.Namespace) -> int:
    rows, cols, markov, rewards, alpha, blockage, seed = _load_common(args)
    _, _, phi = _instance_phi(args, rows, cols, alpha, blockage, seed)
    pi = steady_state_probability(markov)
    if args.mode == "exact":
        value = full_info_upper_bound_exact(phi, rewards, pi)
        print(f"full-information average reward (exact): {value!r}")
    else:
        samples = args.samples if args.samples is not None else DEFAULTS["mc_samples"]
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(1, 0)))
        value, stderr = full_info_upper_bound_mc(phi, rewards, pi, samples, rng)
        print(f"full-information average reward (mc, {samples} samples): {value!r} +- {stderr!r}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else DEFAULTS["seed"]
    failed = False
    if args.suite in ("belief", "all"):
        report = run_belief_suite(seed=seed)
        ok = report.max_error() <= 1e-12
        failed |= not ok
        print(
            f"belief suite: {'ok' if ok else 'FAILED'} "
            f"(max error {report.max_error():.3e} over "
            f"{report.cases_enumeration} enumeration + {report.cases_filter} filter cases)"
        )
    if args.suite in ("average-reward", "all"):
        report = run_average_reward_suite(seed=seed)
        ok = report.max_deviation_sigmas() <= 3.0
        failed |= not ok
        for scheme, closed, sim, err in zip(
            report.schemes, report.closed_form, report.simulated, report.stderr
        ):
            print(
                f"average-reward suite [{scheme}]: closed-form {closed:.6f}, "
                f"simulated {sim:.6f} +- {err:.6f}"
            )
        print(
            f"average-reward suite: {'ok' if ok else 'FAILED'} "
            f"(max deviation {report.max_deviation_sigmas():.2f} standard errors)"
        )
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "tree": _cmd_tree,
        "bound": _cmd_bound,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
