"""Feasibility-preserving alternating-operator-ansatz solver for the CVRP."""

from .encoding import (Encoding, bit_layout, condition_trace, decode,
                       enumerate_feasible, reformulated_cost, route_cost)
from .problem import (Instance, Solution, bundled_instance, exact_solve,
                      generate_instances, load_instance, solution_cost,
                      validate_solution)

__all__ = [
    "Encoding", "Instance", "Solution",
    "bit_layout", "bundled_instance", "condition_trace", "decode",
    "enumerate_feasible", "exact_solve", "generate_instances",
    "load_instance", "reformulated_cost", "route_cost", "solution_cost",
    "validate_solution",
]

__version__ = "0.1.0"
