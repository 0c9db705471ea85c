"""Acceptance gate: one test per release criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion with the measured numbers next to the pinned thresholds.
"""

import hashlib
import json
import math
import random
import statistics
import subprocess
import sys
import time
from pathlib import Path

from ifalloc import (Instance, is_single_round_feasible,
                     run_average_cost_heuristic, run_random_heuristic,
                     solve_exact, validate)
from ifalloc.exact import (brute_force_oracle, build_partition_instance,
                           has_equal_bipartition)
from ifalloc.experiments import (DemandClass, ScenarioConfig,
                                 generate_instance, splits_per_service)
from ifalloc.rounds import compute_bounds, sweep_rounds

from conftest import random_instance

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"

WORKED_EXAMPLE = Instance(
    capacity=((20, 25), (25, 30)),
    unit_cost=((35, 45), (30, 50)),
    activation_cost=(100, 210),
    demand=((100, 80),),
    resource_names=("res1", "res2"),
)

# Device shared by the statistical criteria: representative parameters,
# three interfaces with non-uniform per-unit costs in the tens.
BENCH_CAPACITY = ((30, 25, 28), (28, 30, 24), (30, 26, 30))
BENCH_UNIT_COST = ((35, 28, 14), (25, 40, 30), (18, 12, 45))
BENCH_CLASSES = (DemandClass((8, 6, 7)), DemandClass((4, 5, 3)),
                 DemandClass((2, 1, 2)))


def bench_config(activation, seed) -> ScenarioConfig:
    return ScenarioConfig(
        name="acceptance", resource_names=("cpu", "rate", "buffer"),
        interface_names=("eth", "wifi", "lte"), capacity=BENCH_CAPACITY,
        unit_cost=BENCH_UNIT_COST, activation=activation,
        demand_classes=BENCH_CLASSES, service_range=(3, 6), runs=1, seed=seed)


def criterion2_instances(count=1000, seed=20250810):
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(count)]


def test_c1_worked_example_bounds():
    elapsed = math.inf
    for _ in range(10):
        start = time.perf_counter()
        bounds = compute_bounds(WORKED_EXAMPLE)
        elapsed = min(elapsed, time.perf_counter() - start)
    assert bounds.r_min == 3
    assert bounds.r_max == 4
    assert bounds.cheapest_interface == (1, 0)  # 1-indexed: (2, 1)
    assert elapsed < 1e-3
    print(f"\ncriterion 1: PASS  r_min=3 r_max=4 cheapest=(2,1) "
          f"in {elapsed * 1e6:.0f} us")


def test_c2_exact_matches_brute_force():
    start = time.perf_counter()
    instances = criterion2_instances()
    for inst in instances:
        exact = solve_exact(inst).cost.total
        oracle = brute_force_oracle(inst, limit=500_000_000).cost.total
        assert exact == oracle
    elapsed = time.perf_counter() - start
    assert elapsed < 60
    print(f"\ncriterion 2: PASS  {len(instances)} instances, "
          f"exact == brute force, {elapsed:.1f}s")


def test_c3_partition_reduction_soundness():
    start = time.perf_counter()
    rng = random.Random(99)
    checked = with_partition = 0
    while checked < 200:
        vals = [rng.randint(1, 12) for _ in range(rng.randint(1, 10))]
        if sum(vals) % 2:
            continue
        checked += 1
        best = solve_exact(build_partition_instance(vals)).cost.total
        if has_equal_bipartition(vals):
            with_partition += 1
            assert best == len(vals)
        else:
            assert best >= len(vals) + 1
    elapsed = time.perf_counter() - start
    assert elapsed < 30
    print(f"\ncriterion 3: PASS  {checked} multisets "
          f"({with_partition} with equal bipartition), {elapsed:.1f}s")


def test_c4_heuristic_dominance_and_feasibility():
    instances = criterion2_instances()
    for n, inst in enumerate(instances):
        optimum = solve_exact(inst).cost.total
        for result in (run_random_heuristic(inst, n),
                       run_average_cost_heuristic(inst)):
            assert validate(inst, result.allocation, 1).ok
            assert result.cost.total >= optimum
    print(f"\ncriterion 4: PASS  both heuristics feasible and >= exact "
          f"on {len(instances)} instances")


def test_c5_low_activation_near_optimal():
    config = bench_config((20, 20, 20), seed=11)
    rng = random.Random(config.seed)
    ratios = {"rand": [], "avg": []}
    runs = 0
    while runs < 500:
        for j in config.j_values():
            if runs >= 500:
                break
            heuristic_seed = rng.getrandbits(63)
            while True:
                inst = generate_instance(config, j, rng.getrandbits(63))
                if is_single_round_feasible(inst):
                    break
            optimum = solve_exact(inst).cost.total
            ratios["rand"].append(
                run_random_heuristic(inst, heuristic_seed).cost.total / optimum)
            ratios["avg"].append(
                run_average_cost_heuristic(inst).cost.total / optimum)
            runs += 1
    lines = []
    for solver, values in ratios.items():
        values.sort()
        median = statistics.median(values)
        p95 = values[math.ceil(0.95 * len(values)) - 1]
        lines.append(f"{solver}: median={median:.4f} p95={p95:.4f} "
                     f"max={values[-1]:.4f}")
        assert median <= 1.10
        assert p95 <= 1.25
    print(f"\ncriterion 5: PASS  {runs} runs; " + "; ".join(lines))


def unsplit_assignment_exists(inst: Instance) -> bool:
    rem = [list(row) for row in inst.capacity]

    def rec(j: int) -> bool:
        if j == inst.num_services:
            return True
        for i in range(inst.num_interfaces):
            if all(inst.demand[j][k] <= rem[i][k]
                   for k in range(inst.num_resources)):
                for k in range(inst.num_resources):
                    rem[i][k] -= inst.demand[j][k]
                if rec(j + 1):
                    return True
                for k in range(inst.num_resources):
                    rem[i][k] += inst.demand[j][k]
        return False

    return rec(0)


def test_c6_high_activation_avoids_splits():
    config = bench_config((500, 500, 500), seed=77)
    rng = random.Random(config.seed)
    splits = []
    while len(splits) < 500:
        for j in config.j_values():
            if len(splits) >= 500:
                break
            while True:
                inst = generate_instance(config, j, rng.getrandbits(63))
                if is_single_round_feasible(inst) and unsplit_assignment_exists(inst):
                    break
            result = solve_exact(inst)
            splits.append(splits_per_service(result.allocation))
    mean_splits = statistics.fmean(splits)
    assert mean_splits <= 1.05
    print(f"\ncriterion 6: PASS  {len(splits)} runs, "
          f"mean splits per service = {mean_splits:.4f}")


def test_c7_round_sweep_monotone():
    classes = [(9, 2), (3, 10), (6, 6)]
    flat_exceptions = []
    cases = 0
    for seed in range(5):
        rng = random.Random(1000 + seed)
        for j in (3, 6, 9):
            demand = tuple(tuple(rng.choice(classes)) for _ in range(j))
            inst = Instance(capacity=((10, 8), (10, 8)),
                            unit_cost=((22, 20), (20, 8)),
                            activation_cost=(100, 110), demand=demand)
            bounds = compute_bounds(inst)
            sweep = sweep_rounds(inst, "exact", bounds.r_min, bounds.r_max + 2)
            totals = {r: res.cost.total for r, res in sweep}
            ordered = [totals[r] for r in sorted(totals)]
            assert all(a >= b for a, b in zip(ordered, ordered[1:])), \
                f"sweep not monotone at seed={seed} j={j}: {ordered}"
            cases += 1
            if (totals[bounds.r_max + 1] != totals[bounds.r_max]
                    or totals[bounds.r_max + 2] != totals[bounds.r_max]):
                flat_exceptions.append((seed, j, totals))
    # cost is expected flat beyond r_max; exceptions are reported, not failed
    for exc in flat_exceptions:
        print(f"\ncriterion 7: note - cost kept falling past r_max: {exc}")
    print(f"\ncriterion 7: PASS  {cases} sweeps non-increasing; "
          f"{len(flat_exceptions)} flat-beyond-r_max exceptions")


def test_c8_heuristic_step_count_scaling():
    def ladder_instance(j_count: int) -> Instance:
        rng = random.Random(123)
        I, K = 4, 3
        return Instance(
            capacity=tuple(tuple(50 * j_count for _ in range(K)) for _ in range(I)),
            unit_cost=tuple(tuple(rng.randint(5, 45) for _ in range(K))
                            for _ in range(I)),
            activation_cost=tuple(rng.randint(10, 400) for _ in range(I)),
            demand=tuple(tuple(rng.randint(0, 9) for _ in range(K))
                         for _ in range(j_count)))

    def bound(I, J, K):
        n = K * J
        return I * n + n * math.log2(n)

    report = []
    for name, run in (("rand", lambda inst: run_random_heuristic(inst, 5)),
                      ("avg", run_average_cost_heuristic)):
        ratios = []
        for j_count in (8, 16, 32, 64):
            ops = run(ladder_instance(j_count)).ops
            ratios.append(ops / bound(4, j_count, 3))
        spread = max(ratios) / min(ratios)
        report.append(f"{name}: spread={spread:.3f}")
        assert spread <= 2.0
    print(f"\ncriterion 8: PASS  ops track I*K*J + K*J*log(K*J); "
          + "; ".join(report))


def _run_cli(*args, cwd):
    proc = subprocess.run([sys.executable, "-m", "ifalloc", *args],
                          capture_output=True, cwd=cwd)
    return proc.returncode, proc.stdout


def _tree_digest(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_c9_cli_byte_determinism(tmp_path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps({
        "name": "det", "resources": ["cpu", "rate"],
        "interfaces": [
            {"name": "eth", "capacity": [12, 12], "unit_cost": [3, 5]},
            {"name": "wifi", "capacity": [12, 12], "unit_cost": [4, 2]}],
        "activation_profile": [6, 6],
        "demand_classes": [{"demand": [3, 2]}, {"demand": [1, 4]}],
        "service_range": [2, 3], "runs": 4, "seed": 99}))
    small = str(DATA / "device_small.json")
    overloaded = str(DATA / "device_overloaded.json")
    alloc_path = tmp_path / "alloc.json"
    alloc_path.write_text(json.dumps({"x": [[[60, 75]], [[40, 5]]]}))

    invocations = [
        ("solve-exact", ["solve", "--in", small, "--solver", "exact"], None),
        ("solve-rand", ["solve", "--in", small, "--solver", "rand",
                        "--seed", "42"], None),
        ("solve-avg", ["solve", "--in", small, "--solver", "avg"], None),
        ("bounds", ["bounds", "--in", overloaded], None),
        ("multiround", ["multiround", "--in", overloaded, "--rounds", "3",
                        "--solver", "exact"], None),
        ("sweep", ["multiround", "--in", overloaded, "--solver", "exact",
                   "--sweep", "3", "5", "--out", "OUTDIR"], "sweep"),
        ("bench", ["bench", "--scenario", str(scenario), "--out", "OUTDIR"],
         "bench"),
        ("validate", ["validate", "--in", overloaded, "--alloc",
                      str(alloc_path), "--rounds", "3"], None),
    ]
    checked_files = 0
    for name, args, out_token in invocations:
        outcomes = []
        for attempt in range(2):
            workdir = tmp_path / f"{name}-{attempt}"
            workdir.mkdir()
            concrete = [a if a != "OUTDIR" else str(workdir / "out")
                        for a in args]
            code, stdout = _run_cli(*concrete, cwd=workdir)
            assert code == 0, f"{name} failed: {stdout!r}"
            stdout = stdout.replace(str(workdir).encode(), b"WORKDIR")
            digest = _tree_digest(workdir)
            outcomes.append((stdout, digest))
        assert outcomes[0] == outcomes[1], f"{name} not byte-identical"
        checked_files += len(outcomes[0][1])
    print(f"\ncriterion 9: PASS  {len(invocations)} invocations byte-identical "
          f"across repeat runs ({checked_files} output files compared)")
