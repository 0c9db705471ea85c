"""Toolkit for assigning splittable service demands to device interfaces.

Exact and heuristic solvers over a shared cost model, multi-round
extensions, and a reproducible Monte-Carlo benchmark harness.
"""

from .errors import (BudgetExhaustedError, CapacityExhaustedError,
                     IfallocError, InfeasibleError, InputError,
                     SearchSpaceError)
from .exact import (ExactResult, brute_force_oracle, build_partition_instance,
                    has_equal_bipartition, solve_exact)
from .heuristics import (DemandOrder, HeuristicResult, greedy_allocate,
                         normalize_demands, order_average_cost,
                         order_random_equal_shares, run_average_cost_heuristic,
                         run_random_heuristic)
from .model import (Allocation, CostBreakdown, Instance, ValidationReport,
                    activation_matrix, is_single_round_feasible, total_cost,
                    validate)
from .rounds import (RoundBounds, RoundSchedule, compute_bounds,
                     decompose_rounds, solve_multi_round, sweep_rounds)

__version__ = "0.1.0"

__all__ = [
    "Allocation", "BudgetExhaustedError", "CapacityExhaustedError",
    "CostBreakdown", "DemandOrder", "ExactResult", "HeuristicResult",
    "IfallocError", "InfeasibleError", "InputError", "Instance",
    "RoundBounds", "RoundSchedule", "SearchSpaceError", "ValidationReport",
    "activation_matrix", "brute_force_oracle", "build_partition_instance",
    "compute_bounds", "decompose_rounds", "greedy_allocate",
    "has_equal_bipartition", "is_single_round_feasible", "normalize_demands",
    "order_average_cost", "order_random_equal_shares",
    "run_average_cost_heuristic", "run_random_heuristic", "solve_exact",
    "solve_multi_round", "sweep_rounds", "total_cost", "validate",
]
