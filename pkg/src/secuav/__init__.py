"""Minimum-latency secure UAV content-delivery planning.

A UAV must deliver a fixed content volume to each ground user over a
line-of-sight channel while a known eavesdropper listens.  The library
searches the smallest number of flight slots for which a trajectory and a
one-user-per-slot schedule deliver everything at positive secrecy rate,
using a penalty-based block-coordinate method inside a bisection over the
slot count.
"""

from .approx import AuxiliaryMatrix, optimal_x, penalty, trace_objective
from .baselines import circular_baseline, hover_baseline
from .bounds import (FeasibilityBound, feasibility_bound, hover_tour_slots,
                     hover_witness, overhead_secrecy_rate, prop1_bound,
                     travel_lower_bound, user_tour_length,
                     worst_case_overhead_rate)
from .convex_solver import (ConvexSolution, TrajectorySubproblem,
                            eve_rate_of_slack, solve_association,
                            solve_association_interior, solve_trajectory,
                            subproblem_residuals)
from .errors import (DegenerateGeometry, DimensionMismatch, InfeasibleBracket,
                     InfeasibleHorizon, InstanceTooLarge, MaxIterations,
                     NeverCompletes, NonMonotoneObjective, NumericalFailure,
                     ScenarioFormatError, SecuavError)
from .planner import (PlanResult, SolverOptions, TraceRow, bisect_slots,
                      default_init, feasible_for, minimize_latency,
                      penalized_value, repair_schedule, result_from_plan,
                      round_and_polish,
                      round_association, solve_cr, solve_p1, solve_p1_binary)
from .scenario import (EPS_BIN, EPS_FEAS, Association, Scenario, Trajectory,
                       db_to_linear, dbm_to_watts, megabytes_to_bits,
                       min_user_rate_sum, reference_scenario,
                       rate_difference_matrix, secrecy_rate,
                       spectral_rate_eve, spectral_rate_user)
from .validate import (PlanReport, brute_force_association,
                       brute_force_values, check_plan)

__version__ = "0.1.0"

__all__ = [
    "Association", "AuxiliaryMatrix", "ConvexSolution", "DegenerateGeometry",
    "DimensionMismatch", "EPS_BIN", "EPS_FEAS", "FeasibilityBound",
    "InfeasibleBracket", "InfeasibleHorizon", "InstanceTooLarge",
    "MaxIterations", "NeverCompletes", "NonMonotoneObjective",
    "NumericalFailure", "PlanReport", "PlanResult", "Scenario",
    "ScenarioFormatError", "SecuavError", "SolverOptions", "TraceRow",
    "Trajectory", "TrajectorySubproblem", "bisect_slots",
    "brute_force_association", "brute_force_values", "check_plan",
    "circular_baseline", "db_to_linear", "dbm_to_watts", "default_init",
    "eve_rate_of_slack", "feasibility_bound", "feasible_for",
    "hover_baseline", "hover_tour_slots", "hover_witness",
    "megabytes_to_bits", "min_user_rate_sum", "minimize_latency",
    "optimal_x", "overhead_secrecy_rate", "reference_scenario",
    "penalized_value", "penalty", "prop1_bound", "rate_difference_matrix",
    "repair_schedule", "result_from_plan", "round_and_polish",
    "round_association",
    "secrecy_rate", "solve_association", "solve_association_interior",
    "solve_cr", "solve_p1", "solve_p1_binary", "solve_trajectory",
    "spectral_rate_eve", "spectral_rate_user", "subproblem_residuals",
    "trace_objective", "travel_lower_bound", "user_tour_length",
    "worst_case_overhead_rate",
]
