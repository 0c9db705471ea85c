"""Multi-round allocation: round bounds, scaled solving, and schedules.

When total demand exceeds single-round capacity, interfaces serve the
demands over R successive rounds, reusing their full capacity each round.
The flat problem with capacities scaled by R carries the same objective;
activation is charged once per (interface, service) pair for the whole
horizon, not per round.

Two policies bracket the sensible choices of R: the fewest rounds that
make the problem feasible at all, and the rounds needed if each resource
only ever uses its cheapest interface (judged by the cost of serving the
full demand there, activation fee included).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleError, InputError
from .exact import ExactResult, solve_exact
from .heuristics import (HeuristicResult, run_average_cost_heuristic,
                         run_random_heuristic)
from .model import Allocation, Instance, validate

SOLVERS = ("exact", "rand", "avg")


@dataclass(frozen=True)
class RoundBounds:
    """Feasibility and cheapest-interface round bounds.

    r_min           -- fewest rounds that can satisfy every demand
    r_max           -- rounds needed when each resource uses only its
                       cheapest interface
    cheapest_interface[k] -- that interface, per resource
    total_demand[k], total_capacity[k] -- the aggregates behind the bounds
    """

    r_min: int
    r_max: int
    cheapest_interface: tuple[int, ...]
    total_demand: tuple[int, ...]
    total_capacity: tuple[int, ...]

    def as_dict(self, inst: Instance | None = None) -> dict:
        out = {"r_min": self.r_min, "r_max": self.r_max,
               "cheapest_interface": list(self.cheapest_interface),
               "total_demand": list(self.total_demand),
               "total_capacity": list(self.total_capacity)}
        if inst is not None:
            out["cheapest_interface_names"] = [
                inst.interface_names[i] for i in self.cheapest_interface]
        return out


def compute_bounds(inst: Instance) -> RoundBounds:
    """Round bounds r_min = max_k ceil(D_k/B_k) and the cheapest-interface r_max."""
    K = inst.num_resources
    D = [inst.total_demand(k) for k in range(K)]
    B = [inst.total_capacity(k) for k in range(K)]
    for k in range(K):
        if D[k] > 0 and B[k] == 0:
            raise InfeasibleError(
                f"infeasible: resource {inst.resource_names[k]} has demand "
                f"{D[k]} but zero capacity", resource=inst.resource_names[k])

    r_min = 1
    for k in range(K):
        if D[k] > 0:
            r_min = max(r_min, math.ceil(D[k] / B[k]))

    cheapest = []
    for k in range(K):
        candidates = range(inst.num_interfaces)
        best = min(candidates,
                   key=lambda i: (inst.unit_cost[i][k] * D[k] + inst.activation_cost[i], i))
        if D[k] > 0 and inst.capacity[best][k] == 0:
            with_cap = [i for i in candidates if inst.capacity[i][k] > 0]
            best = min(with_cap,
                       key=lambda i: (inst.unit_cost[i][k] * D[k] + inst.activation_cost[i], i))
        cheapest.append(best)

    r_max = 1
    for k in range(K):
        if D[k] > 0:
            r_max = max(r_max, math.ceil(D[k] / inst.capacity[cheapest[k]][k]))
    r_max = max(r_max, r_min)

    return RoundBounds(r_min=r_min, r_max=r_max,
                       cheapest_interface=tuple(cheapest),
                       total_demand=tuple(D), total_capacity=tuple(B))


def solve_multi_round(inst: Instance, rounds: int, solver: str = "exact",
                      seed: int | None = None,
                      node_budget: int | None = None) -> ExactResult | HeuristicResult:
    """Solve the flat problem with capacities scaled by `rounds`.

    The objective is unchanged: activation is charged once per
    (interface, service) pair across the whole horizon.
    """
    if rounds < 1:
        raise InputError("rounds must be >= 1")
    bounds = compute_bounds(inst)
    if rounds < bounds.r_min:
        k = next(k for k in range(inst.num_resources)
                 if bounds.total_demand[k] > 0
                 and math.ceil(bounds.total_demand[k] / bounds.total_capacity[k]) > rounds)
        raise InfeasibleError(
            f"infeasible: resource {inst.resource_names[k]} needs at least "
            f"{bounds.r_min} rounds, got {rounds}",
            resource=inst.resource_names[k], rounds_needed=bounds.r_min)

    if solver == "exact":
        return solve_exact(inst, rounds=rounds, node_budget=node_budget)
    scaled = inst.scaled(rounds)
    if solver == "rand":
        return run_random_heuristic(scaled, seed)
    if solver == "avg":
        return run_average_cost_heuristic(scaled)
    raise InputError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


@dataclass(frozen=True)
class RoundSchedule:
    """Per-round allocations that sum to a flat multi-round allocation."""

    rounds: tuple[Allocation, ...]

    def __len__(self):
        return len(self.rounds)

    def flat_sum(self) -> Allocation:
        first = self.rounds[0]
        I, J, K = first.num_interfaces, first.num_services, first.num_resources
        acc = [[[0] * K for _ in range(J)] for _ in range(I)]
        for alloc in self.rounds:
            for i in range(I):
                for j in range(J):
                    for k in range(K):
                        acc[i][j][k] += alloc.x[i][j][k]
        return Allocation.from_lists(acc)


def decompose_rounds(inst: Instance, alloc: Allocation, rounds: int) -> RoundSchedule:
    """Split a flat R-round allocation into R per-round allocations.

    Water-fills each round up to the unscaled capacity, taking services in
    index order and splitting amounts at round boundaries.  With zero
    overhead this always succeeds; integer amounts with fractional
    overhead may admit no integer per-round split, which raises.
    """
    report = validate(inst, alloc, rounds)
    if not report.ok:
        raise InputError("allocation does not validate at the requested rounds")
    I, J, K = inst.num_interfaces, inst.num_services, inst.num_resources

    left = [[[alloc.x[i][j][k] for k in range(K)] for j in range(J)] for i in range(I)]
    per_round = []
    for _ in range(rounds):
        x = [[[0] * K for _ in range(J)] for _ in range(I)]
        for i in range(I):
            for k in range(K):
                room = (inst.capacity[i][k] if inst.overhead is None
                        else Fraction(inst.capacity[i][k]))
                for j in range(J):
                    if room <= 0:
                        break
                    if left[i][j][k] == 0:
                        continue
                    if inst.overhead is None:
                        take = min(left[i][j][k], room)
                    else:
                        take = min(left[i][j][k],
                                   math.floor(room / inst.overhead_factor(i, j, k)))
                    if take <= 0:
                        continue
                    x[i][j][k] = take
                    left[i][j][k] -= take
                    room -= inst.consumption(i, j, k, take)
        per_round.append(Allocation.from_lists(x))

    if any(v for plane in left for row in plane for v in row):
        raise InputError(
            "no integer per-round split exists for this allocation "
            "(fractional overhead leaves unschedulable remainders)")
    return RoundSchedule(tuple(per_round))


def sweep_rounds(inst: Instance, solver: str, r_from: int, r_to: int,
                 seed: int | None = None) -> list[tuple[int, "ExactResult | HeuristicResult"]]:
    """Solve for every R in [r_from, r_to]; results line up with Rs."""
    if r_from > r_to:
        raise InputError("sweep range is empty")
    return [(r, solve_multi_round(inst, r, solver=solver, seed=seed))
            for r in range(r_from, r_to + 1)]


def write_sweep_csv(path, sweep, solver: str, seed: int | None):
    """Emit a sweep as CSV rows: R, total, utilization, activation, solver, seed."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["R", "total", "utilization", "activation", "solver", "seed"])
        for r, result in sweep:
            writer.writerow([r, result.cost.total, result.cost.utilization,
                             result.cost.activation, solver,
                             "" if seed is None else seed])
