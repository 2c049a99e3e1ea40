"""Capacity-region admission tests and 2-user boundary tracing."""

import dataclasses
import logging

import numpy as np

from ._errors import UndecidedError, ValidationError
from ._hull import VertexSet, fw_membership, timeshare_lp
from ._options import DEFAULT_OPTIONS
from ._parallel import map_indexed
from ._ratecalc import rate_allocation
from ._solvers import (
    FLAG_INFEASIBLE,
    FLAG_SINGLE,
    FLAG_TIMESHARE,
    SolveReport,
    _vector,
    max_rmac,
    orderings,
)

logger = logging.getLogger(__name__)


class Admission:
    """Answers "is ``b`` in the capacity region of ``ch`` under ``E``?".

    Boundary points (``max_rmac`` results) are memoized by their weight
    vector, and the tone warm starts and last multipliers carry over
    from one call to the next, so a sequence of nearby queries is much
    cheaper than independent :func:`adm_mac` calls.

    """

    def __init__(self, ch, E, options=DEFAULT_OPTIONS):
        ch.require_mac()
        self.ch = ch
        self.E = _vector(E, ch.num_users, "E", positive=True)
        self.options = options
        self._cache = {}
        self._boundary = {}
        self._last_w = None

    def boundary(self, theta):
        """The ``max_rmac`` report for weights ``theta`` (memoized)."""
        theta = np.asarray(theta, dtype=float)
        key = tuple(np.round(theta / np.max(theta), 12))
        if key not in self._boundary:
            init_w = None
            if self._last_w is not None and np.all(self._last_w > 0):
                init_w = self._last_w
            report = max_rmac(self.ch, self.E, theta, self.options,
                              init_w=init_w, cache=self._cache)
            self._last_w = report.w
            self._boundary[key] = report
        return self._boundary[key]

    def test(self, b):
        """Run the admission rounds for the rate target ``b``.

        Each round asks for the boundary vertex ``b_v`` with the current
        weights. ``theta @ (b_v - b) < -eps`` proves ``b`` is outside
        (flag 0, ``theta`` is the separating hyperplane); ``b_v >= b``
        proves it is inside with one order (flag 1). Otherwise the
        vertices of every order within the weight clusters are computed,
        and the vertices collected so far whose orders fit the current
        clusters are screened: if a mixture of them dominates ``b`` the
        flag is 2 (1 when a single vertex does), else the weights of
        deficit users grow and the next round starts.

        Raises:
          UndecidedError: no verdict within ``admission_rounds`` rounds.

        """
        ch, options = self.ch, self.options
        b = _vector(b, ch.num_users, "b")
        budget = {"b": b.tolist(), "E": self.E.tolist()}
        if not np.any(b):
            report = self.boundary(np.ones(ch.num_users))
            return dataclasses.replace(
                report, problem="admmac", budget=budget, trace=[],
                iterations=0, objective=0.0,
            )

        eps = 1e-6 * (1 + np.linalg.norm(b))
        theta = np.ones(ch.num_users)
        seen = []
        plans = []
        trace = []
        gap = None
        for round_ in range(1, options.admission_rounds + 1):
            vertex = self.boundary(theta)
            gap = vertex.rates - b
            margin = float(theta @ gap)
            trace.append(margin)
            logger.debug("admission round %d: theta %s, margin %.3g",
                         round_, np.round(theta, 6).tolist(), margin)
            if margin < -eps:
                return self._verdict(FLAG_INFEASIBLE, vertex, theta, trace,
                                     round_, budget, margin)
            if np.all(gap >= 0):
                return self._verdict(FLAG_SINGLE, vertex, theta, trace,
                                     round_, budget, margin)

            plan_index = len(plans)
            plans.append(vertex.plan)
            orders = orderings(theta, options)
            for order in orders:
                seen.append(rate_allocation(ch, vertex.plan, order,
                                            plan_index))
            # only vertices whose order fits the current weight clusters
            candidates = VertexSet(dimension=ch.num_users)
            for allocation in seen:
                if allocation.order in orders:
                    candidates.add(allocation.totals, tag=allocation)
            screen = fw_membership(candidates, b, dominate=True,
                                   max_iter=options.fw_iterations)
            if screen.inside:
                alpha = timeshare_lp(candidates, b)
                if alpha is not None:
                    keep = np.flatnonzero(alpha > 0)
                    tags = candidates.tags
                    allocations = [tags[k] for k in keep]
                    alpha = alpha[keep] / alpha[keep].sum()
                    energies = sum(
                        a * plans[alloc.plan_index].energies()
                        for a, alloc in zip(alpha, allocations)
                    )
                    flag = FLAG_SINGLE if len(keep) == 1 else FLAG_TIMESHARE
                    logger.info("adm_mac: flag %d over %d vertices after "
                                "%d rounds", flag, len(keep), round_)
                    return SolveReport(
                        problem="admmac",
                        flag=flag,
                        plans=plans,
                        allocations=allocations,
                        alpha=alpha,
                        energies=energies,
                        theta=theta,
                        w=vertex.w,
                        trace=trace,
                        iterations=round_,
                        objective=margin,
                        budget=budget,
                    )

            deficit = np.clip(b - vertex.rates, 0, None)
            theta = theta * (
                1 + options.admission_eta * deficit / np.maximum(b, eps)
            )
            theta /= np.max(theta)

        raise UndecidedError(
            "adm_mac: no verdict after {} rounds".format(
                options.admission_rounds
            ),
            gap=gap,
        )

    def _verdict(self, flag, vertex, theta, trace, rounds, budget, margin):
        logger.info("adm_mac: flag %d after %d rounds", flag, rounds)
        return dataclasses.replace(
            vertex,
            problem="admmac",
            flag=flag,
            theta=theta.copy(),
            trace=trace,
            iterations=rounds,
            objective=margin,
            budget=budget,
        )


def adm_mac(ch, b, E, options=DEFAULT_OPTIONS):
    """Decide whether rates ``b`` are achievable with energies ``E``.

    Returns:
      SolveReport: flag 0 with the separating weights in ``theta``, flag
      1 with a single order, or flag 2 with time-sharing fractions over
      vertices that may come from several covariance plans.

    Raises:
      UndecidedError: the round cap was reached.

    """
    return Admission(ch, E, options).test(b)


@dataclasses.dataclass
class RegionTrace:
    """A traced 2-user capacity-region boundary.

    Attributes:
      b1, b2: The boundary polyline, ``b2[i]`` being the largest rate of
        user 2 admitted together with ``b1[i]``.
      corners: The two SIC vertices of the equal-weight optimum. The
        first decodes user 2 first, so user 1 sees no interference; the
        second uses the opposite order.
      single_user: Each user's rate when it has the channel alone.
      undecided: Bisection probes that ran out of rounds (counted as
        infeasible).

    """

    b1: np.ndarray
    b2: np.ndarray
    corners: list
    single_user: np.ndarray
    undecided: int = 0


def trace_region_2user(ch, E, grid_points=81, options=DEFAULT_OPTIONS,
                       tol=1e-3):
    """Trace the boundary of a 2-user capacity region.

    ``b1`` runs over a uniform grid from 0 to user 1's single-user
    maximum; for each value ``b2`` is bisected with :class:`Admission` as
    the feasibility oracle until the bracket is at most ``tol`` bits.
    Columns are independent and run on ``options.workers`` threads.

    Raises:
      ValidationError: if ``ch`` does not have exactly two users.

    """
    if ch.num_users != 2:
        raise ValidationError(
            "region tracing needs exactly 2 users, got {}".format(
                ch.num_users
            ),
            field="U",
        )
    if grid_points < 2:
        raise ValidationError("at least 2 grid points are needed",
                              field="grid_points")
    oracle = Admission(ch, E, options)
    single = np.array([
        oracle.boundary(np.eye(2)[u]).rates[u] for u in range(2)
    ])
    center = oracle.boundary(np.ones(2))
    corners = [
        rate_allocation(ch, center.plan, order).totals
        for order in ((1, 0), (0, 1))
    ]
    grid = np.linspace(0.0, single[0], grid_points)
    column_options = dataclasses.replace(options, workers=1)

    def column(i):
        if i == 0:
            return single[1], 0
        admission = Admission(ch, E, column_options)
        lo, hi = 0.0, single[1]
        undecided = 0
        while hi - lo > tol:
            mid = (lo + hi) / 2
            try:
                flag = admission.test([grid[i], mid]).flag
            except UndecidedError as exc:
                logger.info("trace: b1=%.4f b2=%.4f undecided (gap %s)",
                            grid[i], mid, exc.gap)
                flag = FLAG_INFEASIBLE
                undecided += 1
            if flag == FLAG_INFEASIBLE:
                hi = mid
            else:
                lo = mid
        return lo, undecided

    results = map_indexed(column, grid_points, options.workers,
                          label="column")
    return RegionTrace(
        b1=grid,
        b2=np.array([r[0] for r in results]),
        corners=corners,
        single_user=single,
        undecided=sum(r[1] for r in results),
    )
