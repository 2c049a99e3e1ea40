"""Top-level package for maccanon."""

from ._version import __version__

from ._errors import (
    ErrorGroup,
    FormatError,
    MacError,
    NonConvergenceError,
    NumericalBreakdown,
    UnboundedToneError,
    UndecidedError,
    ValidationError,
)
from ._tools import catch, split
from ._options import DEFAULT_OPTIONS, SolverOptions
from ._model import (
    ChannelSet,
    ChannelSpec,
    CovariancePlan,
    RateAllocation,
    dual_bc_channel,
    exponential_correlation,
    generate_channel,
    whiten,
)
from ._ratecalc import (
    WeightVector,
    greedy_order,
    log2det,
    polymatroid_bound,
    polymatroid_violation,
    rate_allocation,
    sic_rates,
    weighted_rate_identity,
)
from ._tonesolver import (
    ToneProblem,
    ToneSolution,
    solve_tone,
    tone_gradient,
    tone_objective,
)
from ._ellipsoid import (
    EllipsoidState,
    constraint_cut,
    ellipsoid_step,
    project_orthant,
    stop_metric,
)
from ._hull import (
    Membership,
    VertexSet,
    fw_membership,
    simplex_phase_one,
    timeshare_lp,
)
from ._solvers import (
    FLAG_INFEASIBLE,
    FLAG_SINGLE,
    FLAG_TIMESHARE,
    SolveReport,
    check_report,
    cluster_users,
    max_resmac,
    max_rmac,
    min_pmac,
    orderings,
)
from ._admission import Admission, RegionTrace, adm_mac, trace_region_2user
from ._oracle import BruteProblem, brute_solve, exact_membership, waterfill
from ._serialize import (
    dumps,
    load_channel,
    load_problem,
    load_report,
    loads,
    save_report,
)
from ._study import single_user_rates, timeshare_study

__all__ = [
    "Admission",
    "BruteProblem",
    "ChannelSet",
    "ChannelSpec",
    "CovariancePlan",
    "DEFAULT_OPTIONS",
    "EllipsoidState",
    "ErrorGroup",
    "FLAG_INFEASIBLE",
    "FLAG_SINGLE",
    "FLAG_TIMESHARE",
    "FormatError",
    "MacError",
    "Membership",
    "NonConvergenceError",
    "NumericalBreakdown",
    "RateAllocation",
    "RegionTrace",
    "SolveReport",
    "SolverOptions",
    "ToneProblem",
    "ToneSolution",
    "UnboundedToneError",
    "UndecidedError",
    "ValidationError",
    "VertexSet",
    "WeightVector",
    "adm_mac",
    "brute_solve",
    "catch",
    "check_report",
    "cluster_users",
    "constraint_cut",
    "dual_bc_channel",
    "dumps",
    "ellipsoid_step",
    "exact_membership",
    "exponential_correlation",
    "fw_membership",
    "generate_channel",
    "greedy_order",
    "load_channel",
    "load_problem",
    "load_report",
    "loads",
    "log2det",
    "max_resmac",
    "max_rmac",
    "min_pmac",
    "orderings",
    "polymatroid_bound",
    "polymatroid_violation",
    "project_orthant",
    "rate_allocation",
    "save_report",
    "sic_rates",
    "simplex_phase_one",
    "single_user_rates",
    "solve_tone",
    "split",
    "stop_metric",
    "timeshare_lp",
    "timeshare_study",
    "tone_gradient",
    "tone_objective",
    "trace_region_2user",
    "waterfill",
    "weighted_rate_identity",
    "whiten",
]
