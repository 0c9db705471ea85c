"""Scenario-driven Monte-Carlo benchmarks.

A scenario fixes the device (interfaces, capacities, unit costs), an
activation-cost profile, and a table of demand classes; each run samples
one demand class per service i.i.d. by weight, solves the instance with
the requested solvers, and logs cost, splits, and the heuristic-to-exact
gap.  Draws that are not single-round feasible are rejected and redrawn,
with the rejection count reported.

The shipped demand classes and device parameters are representative
defaults, not calibrated to any external dataset; activation profiles
have well-known named presets (high 500/500/500, mixed 300/100/200,
low 20/20/20).

All sampling derives from one master seed, so identical (scenario, seed,
solvers) settings reproduce results byte-for-byte.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
from dataclasses import dataclass

from .errors import IfallocError, InputError
from .exact import solve_exact
from .heuristics import run_average_cost_heuristic, run_random_heuristic
from .model import (Allocation, Instance, activation_matrix,
                    is_single_round_feasible)
from .rounds import SOLVERS

ACTIVATION_PROFILES = {
    "RSH": (500, 500, 500),
    "RSM": (300, 100, 200),
    "RSL": (20, 20, 20),
    "HDL": (20, 20, 20),
    "LDL": (20, 20, 20),
    "high": (500, 500, 500),
    "mixed": (300, 100, 200),
    "low": (20, 20, 20),
}

RESULT_COLUMNS = ["scenario", "j", "solver", "run", "seed", "total",
                  "utilization", "activation", "splits_per_service", "gap"]


@dataclass(frozen=True)
class DemandClass:
    demand: tuple[int, ...]
    weight: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    resource_names: tuple[str, ...]
    interface_names: tuple[str, ...]
    capacity: tuple[tuple[int, ...], ...]
    unit_cost: tuple[tuple[int, ...], ...]
    activation: tuple[int, ...]
    demand_classes: tuple[DemandClass, ...]
    service_range: tuple[int, int]
    runs: int
    seed: int

    def __post_init__(self):
        if self.runs < 1:
            raise InputError("runs must be >= 1")
        lo, hi = self.service_range
        if lo < 0 or hi < lo:
            raise InputError("service_range must be a nondecreasing pair")
        if not self.demand_classes:
            raise InputError("at least one demand class is required")
        k = len(self.resource_names)
        for cls in self.demand_classes:
            if len(cls.demand) != k:
                raise InputError("demand class length must match resources")
            if cls.weight <= 0:
                raise InputError("demand class weights must be positive")
        if len(self.activation) != len(self.capacity):
            raise InputError("activation profile length must match interfaces")

    def j_values(self) -> range:
        return range(self.service_range[0], self.service_range[1] + 1)


def resolve_profile(profile, num_interfaces: int) -> tuple[int, ...]:
    """Accept a named preset or an explicit per-interface list."""
    if isinstance(profile, str):
        if profile not in ACTIVATION_PROFILES:
            raise InputError(f"unknown activation profile {profile!r}")
        vec = ACTIVATION_PROFILES[profile]
    else:
        vec = tuple(profile)
    if len(vec) != num_interfaces:
        raise InputError(
            f"activation profile has {len(vec)} entries for {num_interfaces} interfaces")
    return tuple(vec)


def scenario_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise InputError("scenario JSON must be an object")
    try:
        resources = tuple(data["resources"])
        interfaces = data["interfaces"]
        classes = data["demand_classes"]
        service_range = tuple(data["service_range"])
        runs = data["runs"]
        seed = data["seed"]
        profile = data["activation_profile"]
    except KeyError as exc:
        raise InputError(f"scenario missing field {exc.args[0]!r}") from None

    names = tuple(item.get("name", f"if{n + 1}") for n, item in enumerate(interfaces))
    caps = tuple(tuple(item["capacity"]) for item in interfaces)
    costs = tuple(tuple(item["unit_cost"]) for item in interfaces)
    activation = resolve_profile(profile, len(interfaces))
    demand_classes = tuple(
        DemandClass(demand=tuple(item["demand"]),
                    weight=float(item.get("weight", 1.0)))
        for item in classes)
    return ScenarioConfig(name=data.get("name", "scenario"),
                          resource_names=resources, interface_names=names,
                          capacity=caps, unit_cost=costs, activation=activation,
                          demand_classes=demand_classes,
                          service_range=(int(service_range[0]), int(service_range[1])),
                          runs=int(runs), seed=int(seed))


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return scenario_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def generate_instance(config: ScenarioConfig, j_count: int, seed: int) -> Instance:
    """Sample `j_count` services i.i.d. from the weighted demand classes."""
    rng = random.Random(seed)
    weights = [cls.weight for cls in config.demand_classes]
    picks = rng.choices(range(len(config.demand_classes)), weights=weights, k=j_count)
    demand = tuple(config.demand_classes[p].demand for p in picks)
    return Instance(capacity=config.capacity, unit_cost=config.unit_cost,
                    activation_cost=config.activation, demand=demand,
                    resource_names=config.resource_names,
                    interface_names=config.interface_names)


def splits_per_service(alloc: Allocation) -> float:
    """Average number of interfaces engaged per service that got anything.

    Equals 1.0 exactly when no service is split.
    """
    act = activation_matrix(alloc)
    engaged = sum(sum(row) for row in act)
    active = sum(1 for j in range(alloc.num_services)
                 if any(act[i][j] for i in range(alloc.num_interfaces)))
    if active == 0:
        raise InputError("no service received any allocation")
    return engaged / active


def _solve_one(inst: Instance, solver: str, heuristic_seed: int):
    if solver == "exact":
        return solve_exact(inst)
    if solver == "rand":
        return run_random_heuristic(inst, heuristic_seed)
    if solver == "avg":
        return run_average_cost_heuristic(inst)
    raise InputError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def run_monte_carlo(config: ScenarioConfig, solvers=("exact", "rand", "avg"),
                    j_values=None):
    """Run the scenario; returns (rows, summary).

    `rows` are per-run dicts matching RESULT_COLUMNS.  `summary` holds
    per-(service count, solver) statistics plus rejection and error
    counts.
    """
    solvers = tuple(solvers)
    for s in solvers:
        if s not in SOLVERS:
            raise InputError(f"unknown solver {s!r}; expected one of {SOLVERS}")
    if j_values is None:
        j_values = config.j_values()

    master = random.Random(config.seed)
    rows = []
    rejections = 0
    errors = 0

    for j in j_values:
        for run in range(config.runs):
            heuristic_seed = master.getrandbits(63)
            while True:
                inst_seed = master.getrandbits(63)
                inst = generate_instance(config, j, inst_seed)
                if is_single_round_feasible(inst):
                    break
                rejections += 1

            totals = {}
            for solver in solvers:
                seed_col = heuristic_seed if solver == "rand" else inst_seed
                try:
                    result = _solve_one(inst, solver, heuristic_seed)
                except IfallocError as exc:
                    errors += 1
                    rows.append({"scenario": config.name, "j": j, "solver": solver,
                                 "run": run, "seed": seed_col, "total": "",
                                 "utilization": "", "activation": "",
                                 "splits_per_service": "", "gap": "",
                                 "error": str(exc)})
                    continue
                cost = result.cost
                totals[solver] = cost.total
                try:
                    splits = splits_per_service(result.allocation)
                except InputError:
                    splits = ""
                rows.append({"scenario": config.name, "j": j, "solver": solver,
                             "run": run, "seed": seed_col, "total": cost.total,
                             "utilization": cost.utilization,
                             "activation": cost.activation,
                             "splits_per_service": splits, "gap": ""})

            if "exact" in totals:
                for row in rows[-len(solvers):]:
                    if (row["solver"] != "exact" and row["total"] != ""
                            and row["j"] == j and row["run"] == run):
                        row["gap"] = row["total"] - totals["exact"]

    summary = _summarize(config, solvers, rows, rejections, errors)
    return rows, summary


def _summarize(config, solvers, rows, rejections, errors) -> dict:
    per_j: dict = {}
    for j in sorted({row["j"] for row in rows}):
        per_j[str(j)] = {}
        for solver in solvers:
            totals = [row["total"] for row in rows
                      if row["j"] == j and row["solver"] == solver
                      and row["total"] != ""]
            if not totals:
                continue
            splits = [row["splits_per_service"] for row in rows
                      if row["j"] == j and row["solver"] == solver
                      and row["splits_per_service"] != ""]
            gaps = [row["gap"] for row in rows
                    if row["j"] == j and row["solver"] == solver
                    and row["gap"] != ""]
            if len(totals) >= 2:
                q1, med, q3 = statistics.quantiles(totals, n=4, method="inclusive")
            else:
                q1 = med = q3 = float(totals[0])
            entry = {"count": len(totals), "min": min(totals), "max": max(totals),
                     "mean": statistics.fmean(totals), "q1": q1, "median": med,
                     "q3": q3}
            if splits:
                entry["mean_splits_per_service"] = statistics.fmean(splits)
            if gaps:
                entry["gap"] = {"mean": statistics.fmean(gaps),
                                "median": statistics.median(gaps),
                                "max": max(gaps)}
            per_j[str(j)][solver] = entry
    return {"scenario": config.name, "seed": config.seed, "runs": config.runs,
            "solvers": list(solvers), "rejections": rejections,
            "errors": errors, "per_j": per_j}


def write_results_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def write_summary_json(path, summary: dict):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
