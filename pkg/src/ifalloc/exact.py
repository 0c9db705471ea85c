"""Exact solvers: branch-and-bound, a brute-force oracle, and a reduction gadget.

`solve_exact` branches over which interfaces each service may engage (the
binary activation pattern).  Once the pattern is fixed the residual
problem falls apart per resource into a transportation problem whose unit
costs depend only on the interface.  Two lower bounds prune the search:
the per-resource transportation relaxation with undecided services left
unrestricted (computed from optimal interface loads alone, with
Gale-Hoffman feasibility built in), and a coupling-aware floor charging
every undecided service its cheapest single-engagement cost.  Children
are visited cheapest floor first, services with identical demand vectors
are deduplicated by canonical ordering, and leaf allocations come from a
small min-cost flow.

`brute_force_oracle` enumerates whole integer allocations and exists to
certify other solvers in tests; it shares no search logic with
`solve_exact`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (BudgetExhaustedError, InfeasibleError, InputError,
                     SearchSpaceError)
from .model import Allocation, CostBreakdown, Instance, total_cost

_INF = float("inf")


@dataclass(frozen=True)
class ExactResult:
    allocation: Allocation
    cost: CostBreakdown
    node_count: int
    proven_optimal: bool


def check_feasible(inst: Instance, rounds: int) -> None:
    """Raise InfeasibleError unless every resource's demand fits R-scaled capacity.

    Exact for zero overhead (splitting is unrestricted); necessary
    otherwise.
    """
    for k in range(inst.num_resources):
        need = inst.total_demand(k)
        have = inst.total_capacity(k)
        if need > have * rounds:
            name = inst.resource_names[k]
            if have == 0:
                raise InfeasibleError(
                    f"infeasible: resource {name} has demand {need} but zero capacity",
                    resource=name)
            needed = -(-need // have)  # ceil division
            raise InfeasibleError(
                f"infeasible: resource {name} needs at least {needed} rounds, got {rounds}",
                resource=name, rounds_needed=needed)


class _StopSearch(Exception):
    pass


def solve_exact(inst: Instance, rounds: int = 1,
                node_budget: int | None = None) -> ExactResult:
    """Minimize utilization plus activation cost over integer allocations.

    Capacity is scaled by `rounds`.  Returns a provably optimal result
    unless `node_budget` nodes were explored first, in which case the best
    incumbent is returned with ``proven_optimal=False``.
    """
    if rounds < 1:
        raise InputError("rounds must be >= 1")
    check_feasible(inst, rounds)

    I, J, K = inst.num_interfaces, inst.num_services, inst.num_resources
    d = inst.demand
    c = inst.unit_cost
    F = inst.activation_cost
    caps = [[rounds * inst.capacity[i][k] for i in range(I)] for k in range(K)]
    pure = not inst.has_overhead

    if J == 0 or all(v == 0 for row in d for v in row):
        alloc = Allocation.zeros(I, J, K)
        return ExactResult(alloc, total_cost(inst, alloc), 0, True)

    # Engagement subsets enumerated cheap-activation first, then fewer
    # interfaces, then the fee-sorted interface positions.  Finds cheap
    # incumbents early; any fixed order preserves correctness.
    by_fee = sorted(range(I), key=lambda i: (F[i], i))
    fee_pos = {i: p for p, i in enumerate(by_fee)}
    masks = []
    for bits in range(1, 1 << I):
        members = [i for i in range(I) if bits >> i & 1]
        fsum = sum(F[i] for i in members)
        masks.append((fsum, len(members), tuple(sorted(fee_pos[i] for i in members)), bits))
    masks.sort()
    mask_order = [(bits, fsum) for fsum, _, _, bits in masks]
    mask_min_cost = [[0] + [min(c[i][k] for i in range(I) if bits >> i & 1)
                            for bits in range(1, 1 << I)] for k in range(K)]

    # Branch services by descending demand weighted with the mean unit
    # cost per resource (sum over interfaces gives the same order).
    col_cost = [sum(c[i][k] for i in range(I)) for k in range(K)]
    weight = [sum(d[j][k] * col_cost[k] for k in range(K)) for j in range(J)]
    svc_order = sorted(range(J), key=lambda j: (-weight[j], j))

    min_fee = min(F)
    positive = [any(d[j][k] > 0 for k in range(K)) for j in range(J)]

    suffix_act = [0] * (J + 1)
    for t in range(J - 1, -1, -1):
        j = svc_order[t]
        suffix_act[t] = suffix_act[t + 1] + (min_fee if positive[j] else 0)

    # Per-(service, mask) cost floor: activation fee plus capacity-blind
    # utilization on that mask.  Children sort by it, so the first dive
    # lands on a strong incumbent and pruning can break, not skip.
    blind_mask = [[fsum + sum(d[j][k] * mask_min_cost[k][bits] for k in range(K))
                   for bits, fsum in mask_order] for j in range(J)]
    kid_order = [None] * J
    best_single = [0] * J
    for j in range(J):
        if positive[j]:
            ranked = sorted(range(len(mask_order)), key=lambda m: (blind_mask[j][m], m))
            kid_order[j] = [(mask_order[m][0], mask_order[m][1], blind_mask[j][m])
                            for m in ranked]
            best_single[j] = blind_mask[j][ranked[0]]

    # Coupling-aware floor over the still-undecided tail: each service
    # pays at least its cheapest single-mask cost.
    suffix_best = [0] * (J + 1)
    for t in range(J - 1, -1, -1):
        suffix_best[t] = suffix_best[t + 1] + best_single[svc_order[t]]

    # Services with identical demand vectors are interchangeable: restrict
    # each to options ranked no earlier than its predecessor's choice.
    svc_group: dict[tuple, int] = {}
    group_of = [0] * J
    for j in range(J):
        group_of[j] = svc_group.setdefault(d[j], len(svc_group))
    group_floor = [0] * len(svc_group)

    full = (1 << I) - 1
    svc_by_k = [[j for j in range(J) if d[j][k] > 0] for k in range(K)]
    demanded_ks = [k for k in range(K) if svc_by_k[k]]
    cost_cols = [[c[i][k] for i in range(I)] for k in range(K)]
    cap_sum = [[sum(caps[k][i] for i in range(I) if T >> i & 1)
                for T in range(1 << I)] for k in range(K)]
    cost_desc = [sorted(range(I), key=lambda i: (-c[i][k], -i)) for k in range(K)]

    # Per-resource demand buckets keyed by the exact engagement mask;
    # undecided services sit in the full-mask bucket.
    allowed = [full] * J
    demand_by_mask = [[0] * (1 << I) for _ in range(K)]
    for k in demanded_ks:
        demand_by_mask[k][full] = sum(d[j][k] for j in svc_by_k[k])

    best_total = None
    best_alloc = None
    best_cost = None
    node_count = 0

    def relax(with_flows: bool):
        """Exact min utilization with undecided services unrestricted.

        Returns (utilization, flows or None); None when some resource is
        already infeasible.  Cost-wise this equals the min-cost flow (the
        feasible interface-load vectors form a generalized polymatroid,
        so most-expensive-first minimization is optimal); flows are only
        materialized at leaves.
        """
        util = 0
        for k in demanded_ks:
            cost_k = _min_load_cost(demand_by_mask[k], cap_sum[k],
                                    cost_cols[k], cost_desc[k], full)
            if cost_k is None:
                return None
            util += cost_k
        if not with_flows:
            return util, None
        flows_by_k = [None] * K
        for k in demanded_ks:
            svcs = svc_by_k[k]
            res = _min_cost_transport([d[j][k] for j in svcs],
                                      [allowed[j] for j in svcs],
                                      caps[k], cost_cols[k])
            if res is None:
                return None
            flows_by_k[k] = res[1]
        return util, flows_by_k

    def record_leaf(flows_by_k):
        nonlocal best_total, best_alloc, best_cost
        x = [[[0] * K for _ in range(J)] for _ in range(I)]
        for k in range(K):
            flows = flows_by_k[k]
            if flows is None:
                continue
            for s, j in enumerate(svc_by_k[k]):
                for i in range(I):
                    x[i][j][k] = flows[s][i]
        alloc = Allocation.from_lists(x)
        cb = total_cost(inst, alloc)
        if best_total is None or cb.total < best_total:
            best_total = cb.total
            best_alloc = alloc
            best_cost = cb

    def dfs_pure(t: int, act: int, committed: int):
        nonlocal node_count
        leaf = t == J
        res = relax(with_flows=leaf)
        if res is None:
            return
        util_lb, flows_by_k = res
        if best_total is not None and act + suffix_act[t] + util_lb >= best_total:
            return
        if leaf:
            record_leaf(flows_by_k)
            return
        j = svc_order[t]
        if not positive[j]:
            dfs_pure(t + 1, act, committed)
            return
        touched = [k for k in demanded_ks if d[j][k] > 0]
        group = group_of[j]
        start = group_floor[group]
        kids = kid_order[j]
        for idx in range(start, len(kids)):
            bits, fsum, floor = kids[idx]
            node_count += 1
            if node_budget is not None and node_count > node_budget:
                raise _StopSearch
            child_committed = committed + floor
            if (best_total is not None
                    and child_committed + suffix_best[t + 1] >= best_total):
                break  # children are floor-sorted; the rest only cost more
            allowed[j] = bits
            group_floor[group] = idx
            for k in touched:
                demand_by_mask[k][full] -= d[j][k]
                demand_by_mask[k][bits] += d[j][k]
            dfs_pure(t + 1, act + fsum, child_committed)
            for k in touched:
                demand_by_mask[k][bits] -= d[j][k]
                demand_by_mask[k][full] += d[j][k]
        group_floor[group] = start
        allowed[j] = full

    # Fallback search for instances with overhead: capacity-blind bounds
    # plus exact per-resource enumeration at the leaves.  Desk scale only.
    chosen = [0] * J

    def evaluate_leaf_overhead():
        nonlocal best_total, best_alloc, best_cost
        x = [[[0] * K for _ in range(J)] for _ in range(I)]
        for k in range(K):
            svcs = svc_by_k[k]
            if not svcs:
                continue
            res = _overhead_transport(inst, rounds, k, svcs,
                                      [chosen[j] for j in svcs])
            if res is None:
                return
            _, flows = res
            for s, j in enumerate(svcs):
                for i in range(I):
                    x[i][j][k] = flows[s][i]
        alloc = Allocation.from_lists(x)
        cb = total_cost(inst, alloc)
        if best_total is None or cb.total < best_total:
            best_total = cb.total
            best_alloc = alloc
            best_cost = cb

    def dfs_overhead(t: int, committed: int):
        nonlocal node_count
        if t == J:
            evaluate_leaf_overhead()
            return
        j = svc_order[t]
        if not positive[j]:
            chosen[j] = 0
            dfs_overhead(t + 1, committed)
            return
        kids = kid_order[j]
        for idx in range(len(kids)):
            bits, _fsum, floor = kids[idx]
            node_count += 1
            if node_budget is not None and node_count > node_budget:
                raise _StopSearch
            child_committed = committed + floor
            if (best_total is not None
                    and child_committed + suffix_best[t + 1] >= best_total):
                break
            chosen[j] = bits
            dfs_overhead(t + 1, child_committed)
        chosen[j] = 0

    proven = True
    try:
        if pure:
            dfs_pure(0, 0, 0)
        else:
            dfs_overhead(0, 0)
    except _StopSearch:
        proven = False

    if best_alloc is None:
        if proven:
            raise InfeasibleError(
                "infeasible: no allocation satisfies the capacity constraints "
                f"within {rounds} round(s)")
        raise BudgetExhaustedError(
            f"node budget {node_budget} exhausted before any feasible solution")
    return ExactResult(best_alloc, best_cost, node_count, proven)


def _min_load_cost(dbm, usum, costs, desc_order, full):
    """Minimum total utilization cost of one resource, from loads alone.

    `dbm[mask]` buckets demand by exact engagement mask, `usum[T]` is the
    capacity of interface subset T.  Feasibility is the Gale-Hoffman
    condition (every subset covers the demand confined to it); the
    minimizing load vector is found by fixing interfaces most expensive
    first to the least load the subset constraints allow.  Returns None
    when infeasible.
    """
    forced = [0] * (full + 1)
    for T in range(full + 1):
        s = 0
        sub = T
        while True:
            s += dbm[sub]
            if sub == 0:
                break
            sub = (sub - 1) & T
        if s > usum[T]:
            return None
        forced[T] = s
    fixed = [0] * (full + 1)
    remaining = full
    total = 0
    for i in desc_order:
        bit = 1 << i
        rest = remaining & ~bit
        zmin = 0
        for T in range(full + 1):
            if not T & bit:
                continue
            need = forced[T] - fixed[T & ~remaining] - usum[T & rest]
            if need > zmin:
                zmin = need
        if zmin:
            total += costs[i] * zmin
            for T in range(full + 1):
                if T & bit:
                    fixed[T] += zmin
        remaining = rest
    return total


def _min_cost_transport(demands: list[int], allowed: list[int],
                        caps: list[int], costs: list[int]):
    """Integer min-cost transportation via successive shortest paths.

    `demands[s]` units must flow from service s to interfaces within its
    `allowed[s]` bitmask; interface i takes at most `caps[i]` in total at
    `costs[i]` per unit.  Returns (cost, flows[s][i]) or None if the full
    demand cannot be routed.
    """
    S, I = len(demands), len(caps)
    src, snk = S + I, S + I + 1
    n = S + I + 2

    to, cap, cst, nxt = [], [], [], []
    head = [-1] * n

    def add_edge(u, v, capacity, cost):
        for (a, b, cp, co) in ((u, v, capacity, cost), (v, u, 0, -cost)):
            to.append(b)
            cap.append(cp)
            cst.append(co)
            nxt.append(head[a])
            head[a] = len(to) - 1

    svc_arc = [[-1] * I for _ in range(S)]
    total = 0
    for s, amount in enumerate(demands):
        add_edge(src, s, amount, 0)
        total += amount
        for i in range(I):
            if allowed[s] >> i & 1:
                svc_arc[s][i] = len(to)
                add_edge(s, S + i, amount, costs[i])
    for i in range(I):
        add_edge(S + i, snk, caps[i], 0)

    flow = 0
    cost_acc = 0
    while flow < total:
        # Bellman-Ford; graphs here are a handful of nodes
        dist = [_INF] * n
        in_q = [False] * n
        parent = [-1] * n
        dist[src] = 0
        queue = [src]
        in_q[src] = True
        while queue:
            u = queue.pop(0)
            in_q[u] = False
            e = head[u]
            while e != -1:
                if cap[e] > 0 and dist[u] + cst[e] < dist[to[e]]:
                    dist[to[e]] = dist[u] + cst[e]
                    parent[to[e]] = e
                    if not in_q[to[e]]:
                        queue.append(to[e])
                        in_q[to[e]] = True
                e = nxt[e]
        if dist[snk] == _INF:
            return None
        push = total - flow
        v = snk
        while v != src:
            e = parent[v]
            push = min(push, cap[e])
            v = to[e ^ 1]
        v = snk
        while v != src:
            e = parent[v]
            cap[e] -= push
            cap[e ^ 1] += push
            v = to[e ^ 1]
        flow += push
        cost_acc += push * dist[snk]

    flows = [[0] * I for _ in range(S)]
    for s in range(S):
        for i in range(I):
            e = svc_arc[s][i]
            if e != -1:
                flows[s][i] = cap[e ^ 1]  # reverse-edge capacity equals flow
    return cost_acc, flows


def _overhead_transport(inst: Instance, rounds: int, k: int,
                        svcs: list[int], allowed: list[int]):
    """Exact per-resource allocation with rational overhead, by enumeration.

    Only reached on desk-scale instances that carry nonzero overhead.
    """
    I = inst.num_interfaces
    rem = [Fraction(rounds * inst.capacity[i][k]) for i in range(I)]
    best: list = [None, None]

    flows = [[0] * I for _ in range(len(svcs))]

    def rec(s: int, util: int):
        if best[0] is not None and util >= best[0]:
            return
        if s == len(svcs):
            best[0] = util
            best[1] = [row[:] for row in flows]
            return
        j = svcs[s]
        amount = inst.demand[j][k]
        ifaces = [i for i in range(I) if allowed[s] >> i & 1]

        def place(idx: int, left: int, util_acc: int):
            if best[0] is not None and util_acc >= best[0]:
                return
            if idx == len(ifaces) - 1:
                i = ifaces[idx]
                if inst.consumption(i, j, k, left) <= rem[i]:
                    flows[s][i] = left
                    rem[i] -= inst.consumption(i, j, k, left)
                    rec(s + 1, util_acc + left * inst.unit_cost[i][k])
                    rem[i] += inst.consumption(i, j, k, left)
                    flows[s][i] = 0
                return
            i = ifaces[idx]
            for take in range(left + 1):
                if inst.consumption(i, j, k, take) > rem[i]:
                    break
                flows[s][i] = take
                rem[i] -= inst.consumption(i, j, k, take)
                place(idx + 1, left - take, util_acc + take * inst.unit_cost[i][k])
                rem[i] += inst.consumption(i, j, k, take)
                flows[s][i] = 0

        place(0, amount, util)

    rec(0, 0)
    if best[0] is None:
        return None
    return best[0], best[1]


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


def search_space_size(inst: Instance) -> int:
    """Number of raw demand-split combinations the brute force would visit."""
    size = 1
    I = inst.num_interfaces
    for row in inst.demand:
        for v in row:
            if v > 0:
                size *= math.comb(v + I - 1, I - 1)
    return size


def brute_force_oracle(inst: Instance, rounds: int = 1,
                       limit: int = 20_000_000) -> ExactResult:
    """Exhaustively enumerate feasible integer allocations; return the minimum.

    Independent of `solve_exact` by design: it walks raw demand splits,
    pruning only on capacity.  Intended for tests.
    """
    if rounds < 1:
        raise InputError("rounds must be >= 1")
    size = search_space_size(inst)
    if size > limit:
        raise SearchSpaceError(
            f"brute force space {size} exceeds limit {limit}")

    I, J, K = inst.num_interfaces, inst.num_services, inst.num_resources
    pure = not inst.has_overhead
    slots = [(j, k, inst.demand[j][k])
             for j in range(J) for k in range(K) if inst.demand[j][k] > 0]
    slots.sort(key=lambda t: (-t[2], t[1], t[0]))

    if pure:
        rem = [[rounds * inst.capacity[i][k] for k in range(K)] for i in range(I)]
    else:
        rem = [[Fraction(rounds * inst.capacity[i][k]) for k in range(K)]
               for i in range(I)]
    engaged = [[0] * J for _ in range(I)]
    picks: list[tuple[int, ...]] = [()] * len(slots)
    best: list = [None, None]
    leaves = 0

    def rec(t: int, util: int, act: int):
        nonlocal leaves
        if t == len(slots):
            leaves += 1
            if best[0] is None or util + act < best[0]:
                best[0] = util + act
                best[1] = picks[:]
            return
        j, k, dv = slots[t]
        costs_k = [inst.unit_cost[i][k] for i in range(I)]
        for comp in _compositions(dv, I):
            ok = True
            for i in range(I):
                take = comp[i]
                if take and inst.consumption(i, j, k, take) > rem[i][k]:
                    ok = False
                    break
            if not ok:
                continue
            util_add = 0
            act_add = 0
            for i in range(I):
                take = comp[i]
                if take:
                    rem[i][k] -= inst.consumption(i, j, k, take)
                    util_add += costs_k[i] * take
                    if engaged[i][j] == 0:
                        act_add += inst.activation_cost[i]
                    engaged[i][j] += 1
            picks[t] = comp
            rec(t + 1, util + util_add, act + act_add)
            for i in range(I):
                take = comp[i]
                if take:
                    rem[i][k] += inst.consumption(i, j, k, take)
                    engaged[i][j] -= 1

    rec(0, 0, 0)
    if best[0] is None:
        raise InfeasibleError(
            f"infeasible: no allocation fits within {rounds} round(s)")

    x = [[[0] * K for _ in range(J)] for _ in range(I)]
    for t, (j, k, _) in enumerate(slots):
        for i, take in enumerate(best[1][t]):
            x[i][j][k] = take
    alloc = Allocation.from_lists(x)
    return ExactResult(alloc, total_cost(inst, alloc), leaves, True)


def build_partition_instance(values) -> Instance:
    """Two interfaces, one resource, one service per value.

    Capacities are ceil(S/2) and floor(S/2) of the value sum, unit costs
    zero, activation fee one per interface.  On an even-sum multiset the
    optimal cost equals the number of services exactly when the values
    admit an equal-sum bipartition; any split adds at least one.
    """
    vals = list(values)
    if not vals:
        raise InputError("values must be nonempty")
    if any((not isinstance(v, int)) or isinstance(v, bool) or v <= 0 for v in vals):
        raise InputError("values must be positive integers")
    s = sum(vals)
    return Instance(
        capacity=((-(-s // 2),), (s // 2,)),
        unit_cost=((0,), (0,)),
        activation_cost=(1, 1),
        demand=tuple((v,) for v in vals),
    )


def has_equal_bipartition(values) -> bool:
    """Pseudo-polynomial subset-sum check for an equal-sum bipartition."""
    vals = list(values)
    s = sum(vals)
    if s % 2:
        return False
    bits = 1
    for v in vals:
        bits |= bits << v
    return bool(bits >> (s // 2) & 1)
