"""Exact algorithms for robust selection under budgeted uncertainty."""

from .adversary_continuous import (
    a2st_continuous,
    arec_continuous_dual,
    arec_continuous_intervals,
    arec_continuous_levels,
    compatible_scenario,
    greedy_worst_scenario,
    maximize_envelope,
)
from .adversary_discrete import a2st_discrete, arec_discrete, candidate_alphas_a2st, candidate_pairs_arec
from .model import (
    BudgetModel,
    Instance,
    InstanceError,
    Scenario,
    SelectionSolution,
    make_instance,
    parse_instance,
    serialize_instance,
    validate_instance,
)
from .robust_continuous import dominance_preprocess, pi_candidates, solve_r2st_continuous, solve_rrec_continuous
from .robust_discrete import (
    approx_nominal_rrec,
    approx_r2st,
    build_r2st_discrete_mip,
    build_rrec_discrete_mip,
    evaluate_fixed_x,
    minmax_budgeted,
    parse_lp,
    solve_exact_enumeration,
    special_cases,
    write_lp,
)
from .selection import solve_i2st, solve_irec, solve_selection

__all__ = [
    "BudgetModel",
    "Instance",
    "InstanceError",
    "Scenario",
    "SelectionSolution",
    "a2st_continuous",
    "a2st_discrete",
    "approx_nominal_rrec",
    "approx_r2st",
    "arec_continuous_dual",
    "arec_continuous_intervals",
    "arec_continuous_levels",
    "arec_discrete",
    "build_r2st_discrete_mip",
    "build_rrec_discrete_mip",
    "candidate_alphas_a2st",
    "candidate_pairs_arec",
    "compatible_scenario",
    "dominance_preprocess",
    "evaluate_fixed_x",
    "greedy_worst_scenario",
    "make_instance",
    "maximize_envelope",
    "minmax_budgeted",
    "parse_instance",
    "parse_lp",
    "pi_candidates",
    "serialize_instance",
    "solve_exact_enumeration",
    "solve_i2st",
    "solve_irec",
    "solve_r2st_continuous",
    "solve_rrec_continuous",
    "solve_selection",
    "special_cases",
    "validate_instance",
    "write_lp",
]
