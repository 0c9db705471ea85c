import math
import random

import pytest

from ifalloc import Allocation, InputError, solve_exact
from ifalloc.experiments import (ACTIVATION_PROFILES, DemandClass,
                                 ScenarioConfig, generate_instance,
                                 resolve_profile, run_monte_carlo,
                                 scenario_from_dict, splits_per_service,
                                 write_results_csv, write_summary_json)


def small_config(**overrides) -> ScenarioConfig:
    base = dict(
        name="unit",
        resource_names=("cpu", "rate"),
        interface_names=("eth", "wifi"),
        capacity=((12, 12), (12, 12)),
        unit_cost=((3, 5), (4, 2)),
        activation=(6, 6),
        demand_classes=(DemandClass((3, 2)), DemandClass((1, 4))),
        service_range=(2, 3),
        runs=4,
        seed=99,
    )
    base.update(overrides)
    return ScenarioConfig(**base)


class TestGenerate:
    def test_single_class_degenerate(self):
        cfg = small_config(demand_classes=(DemandClass((2, 2)),))
        inst = generate_instance(cfg, 5, seed=1)
        assert inst.demand == ((2, 2),) * 5

    def test_deterministic_per_seed(self):
        cfg = small_config()
        assert generate_instance(cfg, 4, seed=8) == generate_instance(cfg, 4, seed=8)
        assert generate_instance(cfg, 4, seed=8) != generate_instance(cfg, 4, seed=9)

    def test_equal_weights_binomial(self):
        cfg = small_config()
        rng = random.Random(30)
        hits = 0
        draws = 10000
        for _ in range(draws):
            inst = generate_instance(cfg, 1, seed=rng.getrandbits(32))
            hits += inst.demand[0] == (3, 2)
        sigma = math.sqrt(draws * 0.25)
        assert abs(hits - draws / 2) <= 3 * sigma

    def test_zero_services(self):
        inst = generate_instance(small_config(), 0, seed=4)
        assert inst.num_services == 0


class TestSplitsPerService:
    def test_unsplit_is_one(self):
        alloc = Allocation.from_lists([[[2], [3]], [[0], [0]]])
        assert splits_per_service(alloc) == 1.0

    def test_both_services_split(self):
        alloc = Allocation.from_lists([
            [[0, 0, 0], [8, 0, 0]],
            [[8, 10, 0], [0, 0, 0]],
            [[0, 0, 13], [0, 5, 0]],
        ])
        assert splits_per_service(alloc) == 2.0

    def test_mixed_three_way_split(self):
        alloc = Allocation.from_lists([
            [[1], [4]], [[1], [0]], [[1], [0]],
        ])
        assert splits_per_service(alloc) == 2.0  # (3 + 1) / 2

    def test_zero_demand_service_excluded(self):
        alloc = Allocation.from_lists([[[2], [0]], [[2], [0]]])
        assert splits_per_service(alloc) == 2.0

    def test_no_active_services(self):
        with pytest.raises(InputError):
            splits_per_service(Allocation.zeros(2, 2, 1))


class TestProfiles:
    def test_named(self):
        assert resolve_profile("high", 3) == (500, 500, 500)
        assert resolve_profile("RSM", 3) == (300, 100, 200)
        assert resolve_profile("low", 3) == (20, 20, 20)

    def test_custom_vector(self):
        assert resolve_profile([7, 8], 2) == (7, 8)

    def test_unknown_name(self):
        with pytest.raises(InputError):
            resolve_profile("extreme", 3)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            resolve_profile("high", 2)

    def test_table_presets_match_names(self):
        assert ACTIVATION_PROFILES["RSH"] == ACTIVATION_PROFILES["high"]
        assert ACTIVATION_PROFILES["RSL"] == ACTIVATION_PROFILES["low"]


class TestScenarioParsing:
    def test_from_dict(self):
        cfg = scenario_from_dict({
            "name": "demo",
            "resources": ["cpu"],
            "interfaces": [{"name": "eth", "capacity": [5], "unit_cost": [2]}],
            "activation_profile": [4],
            "demand_classes": [{"demand": [1]}, {"demand": [2], "weight": 3}],
            "service_range": [1, 2],
            "runs": 2,
            "seed": 0,
        })
        assert cfg.activation == (4,)
        assert cfg.demand_classes[1].weight == 3.0

    def test_missing_field(self):
        with pytest.raises(InputError):
            scenario_from_dict({"resources": ["cpu"]})

    def test_bad_weight(self):
        with pytest.raises(InputError):
            small_config(demand_classes=(DemandClass((1, 1), weight=0),))


class TestMonteCarlo:
    def test_single_run_collapses(self):
        cfg = small_config(runs=1, service_range=(2, 2))
        rows, summary = run_monte_carlo(cfg, solvers=("exact",))
        assert len(rows) == 1
        stats = summary["per_j"]["2"]["exact"]
        assert stats["min"] == stats["max"] == stats["median"] == rows[0]["total"]

    def test_gap_nonnegative_everywhere(self):
        cfg = small_config(runs=6, service_range=(2, 4))
        rows, _ = run_monte_carlo(cfg)
        gaps = [row["gap"] for row in rows if row["gap"] != ""]
        assert gaps and all(gap >= 0 for gap in gaps)

    def test_heuristic_totals_match_gap_plus_exact(self):
        cfg = small_config(runs=5)
        rows, _ = run_monte_carlo(cfg)
        by_run = {}
        for row in rows:
            by_run.setdefault((row["j"], row["run"]), {})[row["solver"]] = row
        for group in by_run.values():
            exact_total = group["exact"]["total"]
            for solver in ("rand", "avg"):
                row = group[solver]
                assert row["total"] == exact_total + row["gap"]

    def test_csv_reproducible_byte_for_byte(self, tmp_path):
        cfg = small_config(runs=3)
        paths = []
        for n in range(2):
            rows, summary = run_monte_carlo(cfg)
            csv_path = tmp_path / f"res{n}.csv"
            json_path = tmp_path / f"sum{n}.json"
            write_results_csv(csv_path, rows)
            write_summary_json(json_path, summary)
            paths.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert paths[0] == paths[1]

    def test_rejections_counted(self):
        # one class overflows the single interface; draws with two big
        # services are infeasible and must be redrawn
        cfg = ScenarioConfig(
            name="tight", resource_names=("cpu",), interface_names=("eth",),
            capacity=((6,),), unit_cost=((1,),), activation=(1,),
            demand_classes=(DemandClass((5,)), DemandClass((1,))),
            service_range=(2, 2), runs=20, seed=7)
        rows, summary = run_monte_carlo(cfg, solvers=("avg",))
        assert summary["rejections"] > 0
        assert all(row["total"] != "" for row in rows)

    def test_unknown_solver(self):
        with pytest.raises(InputError):
            run_monte_carlo(small_config(), solvers=("simplex",))


def test_exact_cost_monotone_in_prefix_services():
    cfg = small_config(service_range=(1, 6))
    full = generate_instance(cfg, 6, seed=12)
    prev = 0
    for j in range(1, 7):
        prefix = type(full)(
            capacity=full.capacity, unit_cost=full.unit_cost,
            activation_cost=full.activation_cost, demand=full.demand[:j])
        total = solve_exact(prefix).cost.total
        assert total >= prev
        prev = total
