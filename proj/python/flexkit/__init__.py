"""Flexibility analysis of linear constrained systems under uncertainty."""

from ._core import (
    AffineConstraint,
    CenterResult,
    FlexError,
    FlexSolution,
    GaussianSpec,
    LinearSystem,
    NetworkModel,
    RankLevel,
    RankResult,
    SFEstimate,
    SolveStats,
    UncertaintySetSpec,
    VerificationReport,
    __version__,
    analytic_center,
    apply_filter,
    arithmetic_center,
    build_system,
    confidence_level,
    cvar_norm,
    dist_from_json,
    eliminate_states,
    feasible_center,
    flexibility_index,
    load_dist,
    load_network,
    load_set,
    load_system,
    membership,
    network_from_json,
    network_rank_dot,
    psi,
    rank_constraints,
    set_from_json,
    set_type_name,
    set_value,
    stochastic_flexibility,
    system_from_json,
    verify_solution,
)

__all__ = [
    "AffineConstraint",
    "CenterResult",
    "FlexError",
    "FlexSolution",
    "GaussianSpec",
    "LinearSystem",
    "NetworkModel",
    "RankLevel",
    "RankResult",
    "SFEstimate",
    "SolveStats",
    "UncertaintySetSpec",
    "VerificationReport",
    "__version__",
    "analytic_center",
    "apply_filter",
    "arithmetic_center",
    "build_system",
    "confidence_level",
    "cvar_norm",
    "dist_from_json",
    "eliminate_states",
    "feasible_center",
    "flexibility_index",
    "load_dist",
    "load_network",
    "load_set",
    "load_system",
    "membership",
    "network_from_json",
    "network_rank_dot",
    "psi",
    "rank_constraints",
    "set_from_json",
    "set_type_name",
    "set_value",
    "stochastic_flexibility",
    "system_from_json",
    "verify_solution",
]
