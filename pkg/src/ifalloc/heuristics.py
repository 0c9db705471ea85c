"""Polynomial-time allocation heuristics.

Both variants normalize demands to per-resource shares, decide a serving
order for the demanded (service, resource) pairs, then run one greedy
loop: try the cheapest interface, then the second cheapest, and only if
neither fits compare serving the demand whole on some interface against
splitting it across interfaces cheapest-first.

The two variants differ only in the ordering step: one serves the largest
shares first and breaks ties uniformly at random (seeded; CPython's
Mersenne Twister via `random.Random`, so runs reproduce across
platforms), the other weighs shares by the capacity-weighted average cost
of their resource and needs no randomness.

Share and ordering keys are exact rationals, so sorting never depends on
floating-point rounding.  Every function counts the primitive steps it
performs into an `OpCounter`; the totals back the complexity checks in
the test suite.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import CapacityExhaustedError, InputError
from .model import Allocation, CostBreakdown, Instance, Matrix

_INF = float("inf")


class OpCounter:
    """Mutable tally of primitive operations performed."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def add(self, n: int = 1):
        self.count += n


@dataclass(frozen=True)
class DemandOrder:
    """Serving order over demanded (service, resource) pairs.

    Entries are (j, k, key) with keys non-increasing; every pair with
    positive demand appears exactly once.
    """

    entries: tuple[tuple[int, int, Fraction], ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class HeuristicResult:
    allocation: Allocation
    cost: CostBreakdown
    order: DemandOrder
    seed: int | None
    ops: int


def normalize_demands(demand: Matrix, ops: OpCounter | None = None):
    """Per-resource shares d[j][k] / max_j d[j][k], as exact fractions.

    An all-zero resource column normalizes to zeros.
    """
    ops = ops or OpCounter()
    J = len(demand)
    K = len(demand[0]) if J else 0
    shares = [[Fraction(0)] * K for _ in range(J)]
    for k in range(K):
        m = 0
        for j in range(J):
            ops.add()
            if demand[j][k] > m:
                m = demand[j][k]
        if m:
            for j in range(J):
                ops.add()
                shares[j][k] = Fraction(demand[j][k], m)
        else:
            ops.add(J)
    return tuple(tuple(row) for row in shares)


def _sort_ops(n: int) -> int:
    return n * max(1, math.ceil(math.log2(n))) if n else 0


def order_random_equal_shares(shares, seed: int,
                              ops: OpCounter | None = None) -> DemandOrder:
    """Largest shares first; ties permuted uniformly by the seeded generator."""
    ops = ops or OpCounter()
    rng = random.Random(seed)
    groups: dict[Fraction, list[tuple[int, int]]] = {}
    n = 0
    for j in range(len(shares)):
        for k in range(len(shares[j])):
            if shares[j][k] > 0:
                groups.setdefault(shares[j][k], []).append((j, k))
                n += 1
    ops.add(_sort_ops(n))
    entries = []
    for share in sorted(groups, reverse=True):
        group = sorted(groups[share])
        rng.shuffle(group)
        ops.add(len(group))
        entries.extend((j, k, share) for j, k in group)
    return DemandOrder(tuple(entries))


def order_average_cost(shares, unit_cost: Matrix, capacity: Matrix,
                       ops: OpCounter | None = None) -> DemandOrder:
    """Shares weighted by each resource's capacity-weighted mean cost.

    The per-resource weight is (sum_i c[i][k] * b[i][k]) / 100, identical
    for every service; ties break on the lowest (resource, service) pair.
    """
    ops = ops or OpCounter()
    J = len(shares)
    K = len(shares[0]) if J else 0
    I = len(unit_cost)
    avg = []
    for k in range(K):
        dot = 0
        for i in range(I):
            ops.add()
            dot += unit_cost[i][k] * capacity[i][k]
        avg.append(Fraction(dot, 100))
    keyed = []
    for j in range(J):
        for k in range(K):
            ops.add()
            if shares[j][k] > 0:
                keyed.append((shares[j][k] * avg[k], j, k))
    ops.add(_sort_ops(len(keyed)))
    keyed.sort(key=lambda t: (-t[0], t[2], t[1]))
    return DemandOrder(tuple((j, k, key) for key, j, k in keyed))


def _fits(inst: Instance, rem, i: int, j: int, k: int, units: int) -> bool:
    return inst.consumption(i, j, k, units) <= rem[i][k]


def _max_units(inst: Instance, rem, i: int, j: int, k: int) -> int:
    """Largest unit count of (j, k) that still fits interface i."""
    if inst.overhead is None:
        return rem[i][k]
    factor = inst.overhead_factor(i, j, k)
    return math.floor(rem[i][k] / factor)


def non_split_cost(inst: Instance, rem, engaged, j: int, k: int, units: int,
                   ops: OpCounter | None = None):
    """Cheapest way to serve the demand whole on a single interface.

    Returns (cost, interface); cost is infinite when no interface fits.
    Activation fees count only for interfaces the service has not engaged.
    """
    ops = ops or OpCounter()
    best = (_INF, None)
    for i in range(inst.num_interfaces):
        ops.add()
        if not _fits(inst, rem, i, j, k, units):
            continue
        cost = inst.unit_cost[i][k] * units
        if not engaged[i][j]:
            cost += inst.activation_cost[i]
        if cost < best[0]:
            best = (cost, i)
    return best


def split_cost(inst: Instance, rem, engaged, j: int, k: int, units: int,
               ops: OpCounter | None = None):
    """Cost and plan of splitting the demand across interfaces cheapest-first.

    Interfaces are filled in ascending unit-cost order (lowest index on
    ties); newly engaged interfaces add their activation fee.  Returns
    (cost, [(interface, units), ...]); cost is infinite when the combined
    remaining capacity cannot cover the demand.
    """
    ops = ops or OpCounter()
    order = sorted(range(inst.num_interfaces),
                   key=lambda i: (inst.unit_cost[i][k], i))
    left = units
    cost = 0
    plan = []
    for i in order:
        ops.add()
        if left == 0:
            break
        take = min(left, _max_units(inst, rem, i, j, k))
        if take <= 0:
            continue
        cost += inst.unit_cost[i][k] * take
        if not engaged[i][j]:
            cost += inst.activation_cost[i]
        plan.append((i, take))
        left -= take
    if left > 0:
        return (_INF, None)
    return (cost, plan)


def greedy_allocate(inst: Instance, order: DemandOrder,
                    ops: OpCounter | None = None) -> HeuristicResult:
    """Serve demands in the given order onto the cheapest fitting interfaces.

    Raises CapacityExhaustedError when a demand cannot be served even by
    splitting, which signals the caller to allow more rounds.
    """
    ops = ops or OpCounter()
    I, J, K = inst.num_interfaces, inst.num_services, inst.num_resources
    rem = [[inst.capacity[i][k] if inst.overhead is None
            else Fraction(inst.capacity[i][k]) for k in range(K)]
           for i in range(I)]
    engaged = [[0] * J for _ in range(I)]
    x = [[[0] * K for _ in range(J)] for _ in range(I)]
    util = 0
    ops.add(I * J)

    def allocate(i: int, j: int, k: int, units: int):
        nonlocal util
        ops.add()
        x[i][j][k] += units
        rem[i][k] -= inst.consumption(i, j, k, units)
        util += inst.unit_cost[i][k] * units
        engaged[i][j] = 1

    for j, k, _key in order:
        units = inst.demand[j][k]
        cheapest = None
        second = None
        for i in range(I):
            ops.add()
            if cheapest is None or inst.unit_cost[i][k] < inst.unit_cost[cheapest][k]:
                cheapest = i
        for i in range(I):
            ops.add()
            if i == cheapest:
                continue
            if second is None or inst.unit_cost[i][k] < inst.unit_cost[second][k]:
                second = i

        if _fits(inst, rem, cheapest, j, k, units):
            allocate(cheapest, j, k, units)
            continue
        if second is not None and _fits(inst, rem, second, j, k, units):
            allocate(second, j, k, units)
            continue

        whole_cost, whole_iface = non_split_cost(inst, rem, engaged, j, k, units, ops)
        split_total, plan = split_cost(inst, rem, engaged, j, k, units, ops)
        if whole_cost == _INF and split_total == _INF:
            raise CapacityExhaustedError(
                f"capacity exhausted serving service {inst.service_names[j]} "
                f"resource {inst.resource_names[k]}; allow more rounds",
                service=j, resource=k)
        if whole_cost <= split_total:
            allocate(whole_iface, j, k, units)
        else:
            for i, take in plan:
                allocate(i, j, k, take)

    act = 0
    for i in range(I):
        for j in range(J):
            ops.add()
            if engaged[i][j]:
                act += inst.activation_cost[i]

    alloc = Allocation.from_lists(x)
    return HeuristicResult(allocation=alloc,
                           cost=CostBreakdown(utilization=util, activation=act),
                           order=order, seed=None, ops=ops.count)


def run_random_heuristic(inst: Instance, seed: int) -> HeuristicResult:
    """Normalize, order by shares with seeded tie-breaking, then allocate."""
    if seed is None:
        raise InputError("the random-order heuristic requires a seed")
    ops = OpCounter()
    shares = normalize_demands(inst.demand, ops)
    order = order_random_equal_shares(shares, seed, ops)
    result = greedy_allocate(inst, order, ops)
    return replace(result, seed=seed)


def run_average_cost_heuristic(inst: Instance) -> HeuristicResult:
    """Normalize, order by cost-weighted shares, then allocate."""
    ops = OpCounter()
    shares = normalize_demands(inst.demand, ops)
    order = order_average_cost(shares, inst.unit_cost, inst.capacity, ops)
    return greedy_allocate(inst, order, ops)
