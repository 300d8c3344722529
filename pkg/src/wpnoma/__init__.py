"""Achievable rate regions of a two-user downlink NOMA system whose near
user powers its SIC decoder by RF energy harvesting.

Layout: :mod:`wpnoma.model` holds the domain types, channel/energy
primitives and feasibility checker; :mod:`wpnoma.solver_constant` the
closed-form and convex-search boundary solvers for the constant
decoding-power model; :mod:`wpnoma.solver_dynamic` the grid searches for
the rate-dependent model; :mod:`wpnoma.oracle` the independent
brute-force validator, TDMA baseline and time-sharing hull; and
:mod:`wpnoma.cli` the ``wpnoma`` command-line tool.
"""

from .model import (
    Allocation,
    ConstantPower,
    DomainError,
    DynamicPower,
    InfeasibleTargetRate,
    NonPositiveDistance,
    PowerModel,
    RatePoint,
    RegionBoundary,
    Scheme,
    SystemParams,
    check_feasible,
    decode_denominator,
    decoding_power_dynamic,
    harvested_energy,
    pathloss_gain,
    q_function,
    shannon_rate,
)
from .solver_constant import (
    BoundaryResult,
    ConvexSubproblem,
    SolveStatus,
    f0,
    f1,
    f1_prime,
    f2,
    f2_prime,
    f3,
    f3_prime,
    feasible_interval,
    generalized_boundary,
    generalized_r1_max,
    maximize_concave,
    ps_boundary,
    ps_feasible,
    ps_r1_max,
    solve_p31c,
    solve_p32c,
    ts_boundary,
    ts_r1_max,
)
from .solver_dynamic import (
    GridSpec,
    exhaustive_search,
    r2_candidates,
    search_ranges,
    suboptimal_search,
)
from .oracle import (
    OracleResult,
    brute_force_p0,
    tdma_baseline,
    time_sharing_hull,
    upper_hull_indices,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BoundaryResult",
    "ConstantPower",
    "ConvexSubproblem",
    "DomainError",
    "DynamicPower",
    "GridSpec",
    "InfeasibleTargetRate",
    "NonPositiveDistance",
    "OracleResult",
    "PowerModel",
    "RatePoint",
    "RegionBoundary",
    "Scheme",
    "SolveStatus",
    "SystemParams",
    "brute_force_p0",
    "check_feasible",
    "decode_denominator",
    "decoding_power_dynamic",
    "exhaustive_search",
    "f0",
    "f1",
    "f1_prime",
    "f2",
    "f2_prime",
    "f3",
    "f3_prime",
    "feasible_interval",
    "generalized_boundary",
    "generalized_r1_max",
    "harvested_energy",
    "maximize_concave",
    "pathloss_gain",
    "ps_boundary",
    "ps_feasible",
    "ps_r1_max",
    "q_function",
    "r2_candidates",
    "search_ranges",
    "shannon_rate",
    "solve_p31c",
    "solve_p32c",
    "suboptimal_search",
    "tdma_baseline",
    "time_sharing_hull",
    "ts_boundary",
    "ts_r1_max",
    "upper_hull_indices",
]
