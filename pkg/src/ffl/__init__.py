"""Exact solver for placing one facility and one highway under the L1 metric."""

from .geometry import (
    DemandPoint,
    FFLError,
    Frame,
    HighwayLine,
    Instance,
    PathShape,
    Shape,
    minimal_cover_segment,
    phi_v,
    travel_time,
)
from .objective import THRESHOLD_SPEED, eval_phi_closed, f_validator, lemma_case
from .oracle import OracleConfig, find_case_b_instance, oracle_solve, oracle_travel_time
from .solver import Provenance, Solution, check_solution, solve, solve_case_a, solve_case_b

__all__ = [
    "DemandPoint", "FFLError", "Frame", "HighwayLine", "Instance", "PathShape", "Shape",
    "minimal_cover_segment", "phi_v", "travel_time",
    "THRESHOLD_SPEED", "eval_phi_closed", "f_validator", "lemma_case",
    "OracleConfig", "find_case_b_instance", "oracle_solve", "oracle_travel_time",
    "Provenance", "Solution", "check_solution", "solve", "solve_case_a", "solve_case_b",
]
