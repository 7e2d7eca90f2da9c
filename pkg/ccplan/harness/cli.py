from __future__ import annotations

import argparse
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from ccplan.aio.runner import run_replicates_blocking
from ccplan.errors import BudgetExceeded, Infeasible, InvalidConfig, NoSolution, VerificationFailure
from ccplan.harness.config import RunConfig, resolve_config
from ccplan.harness.results import PenaltySummary, RunResult, write_csv, write_result, write_summary
from ccplan.harness.runner import check_result, run_replicates
from ccplan.harness.sweeps import (
    ALPHA_COLUMNS,
    CONVERGENCE_COLUMNS,
    PENALTY_COLUMNS,
    ReplicateRunner,
    alpha_grid,
    convergence,
    penalty_report,
    sweep_alpha,
)
from ccplan.harness.verify import MUTANTS, SUITES, SuiteName, run_suites
from ccplan.planners.budget import SampleBudget

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_NO_SOLUTION = 3
EXIT_VERIFICATION = 4

RUN_FLAGS = (
    "domain",
    "preset",
    "grid",
    "instance_seed",
    "planner",
    "horizon",
    "delta",
    "functional",
    "discount",
    "budget",
    "c",
    "seed",
    "replicates",
    "workers",
    "oracle_method",
    "m",
    "output",
)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file; flags given on the command line win")
    parser.add_argument(
        "--domain",
        choices=["bandit", "gp", "counterexample", "fig2", "random"],
        help="problem domain; fig2 is the counterexample",
    )
    parser.add_argument("--preset", help="bandit machine preset, table1 (alias three-machines)")
    parser.add_argument("--grid", help="exploration grid size as WxH, e.g. 6x6")
    parser.add_argument("--instance-seed", type=int, help="seed of a random domain instance")
    parser.add_argument(
        "--planner",
        choices=["forward-search", "vulcanfs", "mcts", "vulcan", "oracle", "penalty-sweep"],
        help="planner to run",
    )
    parser.add_argument("--horizon", type=int, help="planning horizon n")
    parser.add_argument("--delta", help="risk bound: linear:A | constant:D | saturating:A,B,C")
    parser.add_argument("--functional", choices=["g", "f1"], help="history reward used in the local constraint")
    parser.add_argument("--discount", type=float, help="discount factor in [0, 1]")
    parser.add_argument("--budget", help="tree search budget: samples:N | seconds:S")
    parser.add_argument("--c", type=float, help="UCT exploration constant")
    parser.add_argument("--seed", type=int, help="base seed; replicate i uses seed + i")
    parser.add_argument("--replicates", type=int, help="number of seeded replicates")
    parser.add_argument("--workers", type=int, help="worker processes for replicates")
    parser.add_argument("--oracle-method", choices=["auto", "enumerate", "frontier"], help="oracle algorithm")
    parser.add_argument("--m", help="penalty weights as start:stop:step, stop included")
    parser.add_argument("--output", help="output directory (overrides $CCPLAN_OUTPUT_DIR)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccplan", description="Risk-bounded planning for chance-constrained MDPs.")
    parser.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a planner on a domain and write result records")
    _add_run_flags(run)

    verify = commands.add_parser("verify", help="run the randomised property suites")
    verify.add_argument("--suite", action="append", choices=[*SUITES, "all"], help="suite to run (repeatable)")
    verify.add_argument("--seed", type=int, default=0, help="first instance seed")
    verify.add_argument("--instances", type=int, default=50, help="random instances per suite")
    verify.add_argument("--budget", default="samples:2000", help="tree search budget for the theorem1 suite")
    verify.add_argument("--mutant", choices=sorted(MUTANTS), help="swap in a broken sequence risk")

    sweep = commands.add_parser("sweep-alpha", help="oracle against forward search across linear risk bounds")
    _add_run_flags(sweep)
    sweep.add_argument("--alpha", default="0.0005:0.003:21", help="alpha grid as start:stop:count")

    converge = commands.add_parser("convergence", help="tree search error as the sample budget grows")
    _add_run_flags(converge)
    converge.add_argument("--budgets", default="1000,2000,5000,10000,20000", help="comma-separated sample budgets")

    penalty = commands.add_parser(
        "penalty-gap", aliases=["fig2"], help="sweep the penalty method and compare with the constrained optimum"
    )
    _add_run_flags(penalty)
    return parser


def _config_from_args(args: argparse.Namespace, **defaults: Any) -> RunConfig:
    flags = {name: getattr(args, name, None) for name in RUN_FLAGS}
    for name, value in defaults.items():
        if flags.get(name) is None and args.config is None:
            flags[name] = value
    return resolve_config(args.config, **flags)


def _replicate_runner(config: RunConfig) -> ReplicateRunner:
    return run_replicates_blocking if config.workers > 1 else run_replicates


def _run_name(config: RunConfig) -> str:
    return f"{config.domain.kind}-{config.planner}-h{config.horizon}-s{config.seed}"


def _write_run(config: RunConfig, results: Sequence[RunResult]) -> Path:
    directory = config.output_dir / _run_name(config)
    for result in results:
        write_result(directory, f"replicate-{result.replicate:03d}", result)
    return write_summary(directory / "summary.csv", results)


def cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    if config.planner == "penalty-sweep":
        return cmd_penalty_gap(args, config)

    results = _replicate_runner(config)(config)
    summary = _write_run(config, results)
    code = EXIT_OK
    for result in results:
        print(f"replicate {result.replicate}: {result.outcome}, root value {result.root_value}, complete {result.complete}")
        if result.outcome != "ok":
            code = max(code, EXIT_NO_SOLUTION)
        try:
            check_result(result)
        except VerificationFailure as exc:
            print(f"verification failed: {exc}")
            code = EXIT_VERIFICATION
    print(f"summary written to {summary}")
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    chosen = args.suite or ["all"]
    suites: list[SuiteName] = list(SUITES) if "all" in chosen else [s for s in SUITES if s in chosen]
    reports = run_suites(
        suites,
        seed=args.seed,
        instances=args.instances,
        budget=SampleBudget.parse(args.budget),
        mutant=args.mutant,
    )
    for report in reports:
        status = "pass" if report.passed else "FAIL"
        print(
            f"{report.name}: {status} ({report.instances} instances, {report.skipped} skipped, "
            f"max residual {report.max_residual:.3g})"
        )
        for failure in report.failures[:5]:
            print(f"  {failure}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFICATION


def _parse_alpha(text: str) -> list[float]:
    try:
        start, stop, count = text.split(":")
        return alpha_grid(float(start), float(stop), int(count))
    except ValueError as exc:
        raise InvalidConfig(f"alpha grid must look like start:stop:count, got {text!r}") from exc


def cmd_sweep_alpha(args: argparse.Namespace) -> int:
    config = _config_from_args(args, domain="bandit", horizon=4)
    rows = sweep_alpha(config, _parse_alpha(args.alpha))
    path = write_csv(config.output_dir / f"alpha-sweep-h{config.horizon}.csv", ALPHA_COLUMNS, rows)
    nonzero = [row["suboptimality_percent"] for row in rows if row.get("suboptimality_percent")]
    if nonzero:
        print(f"mean suboptimality over {len(nonzero)} suboptimal rows: {sum(nonzero) / len(nonzero):.3f}%")
    print(f"alpha sweep written to {path}")
    return EXIT_OK


def cmd_convergence(args: argparse.Namespace) -> int:
    config = _config_from_args(args, domain="bandit", horizon=5, replicates=20)
    try:
        budgets = [int(b) for b in args.budgets.split(",")]
    except ValueError as exc:
        raise InvalidConfig(f"budgets must be comma-separated integers, got {args.budgets!r}") from exc
    rows = convergence(config, budgets, runner=_replicate_runner(config))
    path = write_csv(
        config.output_dir / f"convergence-h{config.horizon}.csv",
        CONVERGENCE_COLUMNS,
        [asdict(row) for row in rows],
    )
    for row in rows:
        print(
            f"budget {row.budget}: error {row.mean_relative_error:.4%}, match {row.policy_match_rate:.0%}, "
            f"complete {row.complete_rate:.0%}"
        )
    print(f"convergence table written to {path}")
    return EXIT_OK


def cmd_penalty_gap(args: argparse.Namespace, config: RunConfig | None = None) -> int:
    if config is None:
        config = _config_from_args(args, domain="counterexample")
    gap, rows = penalty_report(config)
    path = write_csv(config.output_dir / f"penalty-{config.domain.kind}.csv", PENALTY_COLUMNS, rows)
    print(PenaltySummary.from_gap(gap).model_dump_json())
    if gap.optimal_action_index is not None and not gap.recovers_optimum:
        print(f"action {gap.optimal_action_index} is optimal under the chance constraint but never selected")
    print(f"penalty sweep written to {path}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    commands: dict[str, Callable[[argparse.Namespace], int]] = {
        "run": cmd_run,
        "verify": cmd_verify,
        "sweep-alpha": cmd_sweep_alpha,
        "convergence": cmd_convergence,
        "penalty-gap": cmd_penalty_gap,
        "fig2": cmd_penalty_gap,
    }
    try:
        return commands[args.command](args)
    except (InvalidConfig, ValidationError) as exc:
        print(f"configuration error: {exc}")
        return EXIT_CONFIG
    except (NoSolution, Infeasible) as exc:
        print(f"no solution: {exc}")
        return EXIT_NO_SOLUTION
    except VerificationFailure as exc:
        print(f"verification failed: {exc}")
        return EXIT_VERIFICATION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}")
        return EXIT_INTERNAL
    except Exception:
        logger.exception("%s failed", args.command)
        return EXIT_INTERNAL
