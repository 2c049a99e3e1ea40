"""Tunable parameters shared by the solvers."""

import dataclasses
from typing import Tuple

from ._errors import ValidationError


@dataclasses.dataclass(frozen=True)
class SolverOptions:
    """Every tunable of the inner and outer loops, with defaults.

    Derive variants with :func:`dataclasses.replace`, e.g.
    ``replace(SolverOptions(), workers=4)``.

    """

    # L-BFGS / Armijo inner solver
    memory: int = 10
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    initial_step: float = 1.0
    max_inner: int = 200
    tol_inner: float = 1e-7
    cold_scale: float = 0.1
    w_floor: float = 1e-12
    kkt_tol: float = 1e-6
    escape_rounds: int = 3

    # ellipsoid outer loops
    outer_tol: float = 1e-6
    iteration_cap: int = 500  # multiplied by U**2
    radius_factor: float = 100.0
    max_orthant_cuts: int = 50

    # decoding-order structure
    cluster_tol: float = 1e-3
    max_orderings: int = 5040
    polish_limit: float = 1.05
    reach_factor: float = 1e4

    # scalar bisection for a sum-energy budget
    bisection_rel_tol: float = 1e-4
    bisection_log_width: float = 1e-10
    bracket: Tuple[float, float] = (1e-8, 10.0)
    max_bracket_expansions: int = 60

    # hull and admission
    fw_iterations: int = 2000
    admission_rounds: int = 100
    admission_eta: float = 0.5

    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.workers < 1:
            raise ValidationError("workers must be >= 1", field="workers")
        if not 0 < self.backtrack < 1:
            raise ValidationError(
                "backtrack factor must lie in (0, 1)", field="backtrack"
            )
        if self.seed < 0:
            raise ValidationError("seed must be >= 0", field="seed")
        if self.memory < 1:
            raise ValidationError("memory must be >= 1", field="memory")
        lo, hi = self.bracket
        if not 0 < lo < hi:
            raise ValidationError(
                "bracket must satisfy 0 < low < high", field="bracket"
            )


DEFAULT_OPTIONS = SolverOptions()
