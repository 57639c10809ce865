#!/usr/bin/env python3
"""
Command-line interface: pqls gen | solve | baseline | sweep | validate.

Exit codes: 0 success, 1 invalid input, 2 sweep finished with errored rows.
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from .classical import solve_tabu
from .config import ConfigError, load_config
from .engine import ACCEPT_RULES, PqlsParams, run_pqls
from .experiment import PointSummary, run_sweep
from .instance import load_instance, save_instance, write_instance
from .ising import generate_instance
from .subsolver import SUBSOLVER_KINDS, SubsolverSpec, VqeSpec, baseline_spec
from .utils import configure_logging, format_float, resolve_workers
from .validator import validate_instance_text, validate_results_file

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def format_output(data: dict, format_type: str = "text") -> str:
    """Format output data."""
    if format_type == "json":
        return json.dumps(data, indent=2)
    lines = []
    for key, value in data.items():
        if isinstance(value, list):
            lines.append(f"{key}:")
            for item in value:
                lines.append(f"  - {item}")
        elif isinstance(value, dict):
            lines.append(f"{key}:")
            for k, v in value.items():
                lines.append(f"  {k}: {v}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def print_summaries(summaries: Sequence[PointSummary]) -> None:
    """Print one block per sweep summary row."""
    columns = ("method", "n_p", "n_g", "branches", "unit_length", "generations",
               "vqe_iterations", "runs", "errors", "mean_ratio", "median_ratio",
               "pqls_wins", "ties", "pqls_losses", "sign_test_p")

    def cell(summary: PointSummary, name: str) -> str:
        value = getattr(summary, name)
        if value is None:
            return "-"
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    for summary in summaries:
        print(format_output({name: cell(summary, name) for name in columns}))
        print()


def cmd_gen(args: argparse.Namespace) -> int:
    problem = generate_instance(args.n, args.seed)
    if args.out:
        save_instance(problem, args.out)
        print(f"Wrote {problem.n}-spin instance (seed {args.seed}) to {args.out}")
    else:
        sys.stdout.write(write_instance(problem))
    return 0


def _subsolver_from_args(args: argparse.Namespace) -> SubsolverSpec:
    return SubsolverSpec(
        kind=args.subsolver,
        sweeps=args.sweeps,
        t_initial=args.t_initial,
        t_final=args.t_final,
        tenure=args.tenure,
        budget=args.budget,
        vqe=VqeSpec(layers=args.vqe_layers, iterations=args.vqe_iterations, shots=args.vqe_shots),
    )


def cmd_solve(args: argparse.Namespace) -> int:
    problem = load_instance(args.instance)
    params = PqlsParams(
        sub_size=args.sub_size if args.sub_size is not None else min(10, problem.n),
        branches=args.branches,
        unit_length=args.unit_length,
        generations=args.generations,
        subsolver=_subsolver_from_args(args),
        master_seed=args.seed,
        accept_rule=args.accept_rule,
        workers=resolve_workers(args.workers, default=1),
    )

    start = time.perf_counter()
    result = run_pqls(problem, None, params)
    wall_ms = int(round((time.perf_counter() - start) * 1000))

    output = {
        "instance": str(args.instance),
        "n": problem.n,
        "best_energy": result.best_energy if args.json else format_float(result.best_energy),
        "best_config": str(result.best_config),
        "per_generation": [
            e if args.json else format_float(e) for e in result.per_generation
        ],
        "generation_winners": list(result.generation_winners),
        "subsolver_calls": result.subsolver_calls,
        "wall_ms": wall_ms,
    }
    print(format_output(output, "json" if args.json else "text"))
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    problem = load_instance(args.instance)
    spec = baseline_spec(restarts=args.restarts, tenure=args.tenure, budget=args.budget)
    outcome = solve_tabu(problem, spec, args.seed)
    text = format_float(outcome.energy)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    report = run_sweep(config, output=args.out, workers=args.workers)
    if not args.quiet:
        print_summaries(report.summaries)
    print(f"Wrote {len(report.records)} rows to {report.csv_path}")
    print(f"Summary: {report.summary_path}")
    if report.error_count:
        print(f"{report.error_count} rows recorded errors", file=sys.stderr)
        return 2
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    if not args.csv and not args.instance:
        raise ValueError("Nothing to validate: pass --csv and/or --instance")

    all_valid = True
    for path in args.instance or []:
        valid, error = validate_instance_text(Path(path).read_text(encoding="utf-8"))
        if not valid:
            all_valid = False
        if not args.quiet:
            print(f"✓ {path} is valid" if valid else f"✗ {path} is invalid: {error}")

    for path in args.csv or []:
        problems = validate_results_file(path)
        if problems:
            all_valid = False
        if not args.quiet:
            if problems:
                print(f"✗ {path} is invalid:")
                for line, message in problems:
                    print(f"  line {line}: {message}")
            else:
                print(f"✓ {path} is valid")

    return 0 if all_valid else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqls", description="Parallel quantum local search for Ising problems"
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING",
                        help="Logging level for stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # gen
    gen_parser = subparsers.add_parser("gen", help="Generate a random instance")
    gen_parser.add_argument("--n", type=int, required=True, help="Number of spins")
    gen_parser.add_argument("--seed", type=int, default=0, help="Instance seed")
    gen_parser.add_argument("--out", help="Instance file (stdout if omitted)")
    gen_parser.set_defaults(func=cmd_gen)

    # solve
    solve_parser = subparsers.add_parser("solve", help="Run PQLS (or QLS with B=1, N_G=1)")
    solve_parser.add_argument("instance", help="Instance file")
    solve_parser.add_argument("--sub-size", type=int, help="Sub-problem size (default min(10, n))")
    solve_parser.add_argument("--branches", type=int, default=1, help="Branches per generation")
    solve_parser.add_argument("--unit-length", type=int, default=100,
                              help="QLS iterations per branch")
    solve_parser.add_argument("--generations", type=int, default=1, help="Number of generations")
    solve_parser.add_argument("--subsolver", choices=SUBSOLVER_KINDS, default="exact")
    solve_parser.add_argument("--seed", type=int, default=0, help="Master seed")
    solve_parser.add_argument("--accept-rule", choices=ACCEPT_RULES, default="improve_or_equal")
    solve_parser.add_argument("--workers", type=int, help="Worker processes (default 1)")
    solve_parser.add_argument("--sweeps", type=int, default=100, help="Annealing sweeps")
    solve_parser.add_argument("--t-initial", type=float, default=2.0, help="Annealing start temperature")
    solve_parser.add_argument("--t-final", type=float, default=0.05, help="Annealing end temperature")
    solve_parser.add_argument("--tenure", type=int, help="Tabu tenure")
    solve_parser.add_argument("--budget", type=int, help="Tabu iterations")
    solve_parser.add_argument("--vqe-layers", type=int, default=2, help="Entangling layers")
    solve_parser.add_argument("--vqe-iterations", type=int, default=100, help="SPSA iterations")
    solve_parser.add_argument("--vqe-shots", type=int, default=1024, help="Readout shots")
    solve_parser.add_argument("--json", action="store_true", help="JSON summary on stdout")
    solve_parser.set_defaults(func=cmd_solve)

    # baseline
    base_parser = subparsers.add_parser("baseline", help="Tabu baseline energy of an instance")
    base_parser.add_argument("instance", help="Instance file")
    base_parser.add_argument("--seed", type=int, default=0, help="Tabu seed")
    base_parser.add_argument("--restarts", type=int, default=20, help="Tabu restarts")
    base_parser.add_argument("--tenure", type=int, help="Tabu tenure (default max(4, n//4))")
    base_parser.add_argument("--budget", type=int, help="Iterations per restart (default 200n)")
    base_parser.add_argument("--out", help="File to write the energy to")
    base_parser.set_defaults(func=cmd_baseline)

    # sweep
    sweep_parser = subparsers.add_parser("sweep", help="Run a configured experiment sweep")
    sweep_parser.add_argument("--config", required=True, help="TOML experiment configuration")
    sweep_parser.add_argument("--out", help="Results CSV (overrides the config)")
    sweep_parser.add_argument("--workers", type=int, help="Worker processes")
    sweep_parser.add_argument("-q", "--quiet", action="store_true", help="Skip the summary table")
    sweep_parser.set_defaults(func=cmd_sweep)

    # validate
    val_parser = subparsers.add_parser("validate", help="Validate result CSVs or instance files")
    val_parser.add_argument("--csv", action="append", help="Results CSV to check")
    val_parser.add_argument("--instance", action="append", help="Instance file to check")
    val_parser.add_argument("-q", "--quiet", action="store_true", help="Quiet mode (exit code only)")
    val_parser.set_defaults(func=cmd_validate)

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and run the chosen command, returning its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"Error: invalid configuration: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
