"""Command-line interface.

Subcommands: solve, bounds, multiround, bench, validate.  Exit codes:
0 success, 1 infeasible (or failed validation), 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments, figures, jsonio
from .errors import (BudgetExhaustedError, CapacityExhaustedError,
                     IfallocError, InfeasibleError, InputError)
from .exact import ExactResult
from .model import validate
from .rounds import (SOLVERS, compute_bounds, decompose_rounds,
                     solve_multi_round, sweep_rounds, write_sweep_csv)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifalloc",
        description="Assign splittable service demands to device interfaces "
                    "at minimum utilization-plus-activation cost.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a single-round instance")
    p.add_argument("--in", dest="instance", required=True, help="instance JSON")
    p.add_argument("--solver", choices=SOLVERS, default="exact")
    p.add_argument("--seed", type=int, help="seed for the random-order heuristic")
    p.add_argument("--out", help="write the result JSON here instead of stdout")

    p = sub.add_parser("bounds", help="print round bounds for an instance")
    p.add_argument("--in", dest="instance", required=True)

    p = sub.add_parser("multiround", help="solve over R rounds, or sweep a range")
    p.add_argument("--in", dest="instance", required=True)
    p.add_argument("--solver", choices=SOLVERS, default="exact")
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int, help="solve for exactly R rounds")
    p.add_argument("--sweep", type=int, nargs=2, metavar=("FROM", "TO"),
                   help="solve every R in the range and emit a CSV")
    p.add_argument("--out", help="result JSON path (solve) or output directory (sweep)")

    p = sub.add_parser("bench", help="run a scenario benchmark")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--solvers", default="exact,rand,avg",
                   help="comma-separated subset of exact,rand,avg")
    p.add_argument("--no-figures", action="store_true",
                   help="emit only CSV/JSON, skip figure rendering")

    p = sub.add_parser("validate", help="check an allocation against an instance")
    p.add_argument("--in", dest="instance", required=True)
    p.add_argument("--alloc", required=True)
    p.add_argument("--rounds", type=int, default=1)

    return parser


def _emit(text: str, out_path: str | None):
    if out_path:
        Path(out_path).write_text(text + "\n")
        print(out_path)
    else:
        print(text)


def _require_seed(args) -> None:
    if args.solver == "rand" and args.seed is None:
        raise InputError("--seed is required with --solver rand")


def _result_dict(inst, result, solver: str, seed) -> dict:
    out = {"solver": solver}
    if solver == "rand":
        out["seed"] = seed
    out.update(jsonio.allocation_to_dict(inst, result.allocation))
    if isinstance(result, ExactResult):
        out["node_count"] = result.node_count
        out["proven_optimal"] = result.proven_optimal
    return out


def _cmd_solve(args) -> int:
    _require_seed(args)
    inst = jsonio.load_instance(args.instance)
    result = solve_multi_round(inst, 1, solver=args.solver, seed=args.seed)
    _emit(jsonio.dump_json(_result_dict(inst, result, args.solver, args.seed)), args.out)
    return 0


def _cmd_bounds(args) -> int:
    inst = jsonio.load_instance(args.instance)
    bounds = compute_bounds(inst)
    print(jsonio.dump_json(bounds.as_dict(inst)))
    return 0


def _cmd_multiround(args) -> int:
    _require_seed(args)
    if (args.rounds is None) == (args.sweep is None):
        raise InputError("pass exactly one of --rounds or --sweep")
    inst = jsonio.load_instance(args.instance)

    if args.rounds is not None:
        result = solve_multi_round(inst, args.rounds, solver=args.solver,
                                   seed=args.seed)
        schedule = decompose_rounds(inst, result.allocation, args.rounds)
        out = _result_dict(inst, result, args.solver, args.seed)
        out["rounds"] = args.rounds
        out["schedule"] = [[[list(row) for row in plane] for plane in alloc.x]
                           for alloc in schedule.rounds]
        _emit(jsonio.dump_json(out), args.out)
        return 0

    r_from, r_to = args.sweep
    sweep = sweep_rounds(inst, args.solver, r_from, r_to, seed=args.seed)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    write_sweep_csv(csv_path, sweep, args.solver, args.seed)
    fig_path = out_dir / "sweep.png"
    figures.save_sweep(sweep, fig_path, label=args.solver)
    print(csv_path)
    print(fig_path)
    return 0


def _cmd_bench(args) -> int:
    config = experiments.load_scenario(args.scenario)
    solvers = tuple(s.strip() for s in args.solvers.split(",") if s.strip())
    rows, summary = experiments.run_monte_carlo(config, solvers=solvers)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.json"
    experiments.write_results_csv(csv_path, rows)
    experiments.write_summary_json(summary_path, summary)
    written = [csv_path, summary_path]

    if not args.no_figures:
        box_path = out_dir / "cost_boxplot.png"
        figures.save_cost_boxplots(rows, box_path)
        written.append(box_path)
        splits_path = out_dir / "splits.png"
        figures.save_splits(rows, splits_path)
        written.append(splits_path)
        if "exact" in solvers and len(solvers) > 1:
            ratio_path = out_dir / "cost_ratio.png"
            figures.save_cost_ratio(rows, ratio_path)
            written.append(ratio_path)

    for path in written:
        print(path)
    return 0


def _cmd_validate(args) -> int:
    inst = jsonio.load_instance(args.instance)
    alloc = jsonio.load_allocation(args.alloc)
    if args.rounds < 1:
        raise InputError("--rounds must be >= 1")
    report = validate(inst, alloc, rounds=args.rounds)
    print(jsonio.dump_json(report.as_dict()))
    return 0 if report.ok else 1


_COMMANDS = {"solve": _cmd_solve, "bounds": _cmd_bounds,
             "multiround": _cmd_multiround, "bench": _cmd_bench,
             "validate": _cmd_validate}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InfeasibleError, CapacityExhaustedError, BudgetExhaustedError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IfallocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
