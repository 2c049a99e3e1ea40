"""Dual solvers for the MIMO multiple-access channel.

* :func:`max_rmac` maximizes the weighted rate sum under per-user
  energy budgets (ellipsoid over the energy multipliers ``w``).
* :func:`min_pmac` minimizes the weighted energy that supports given
  rates (ellipsoid over the rate weights ``theta``), then recovers a
  decoding order or a time-sharing mixture.
* :func:`max_resmac` maximizes the weighted rate sum under one sum-energy
  budget (geometric bisection on a scalar multiplier).

All three decompose over tones: at fixed duals every tone is an
independent :func:`~maccanon._tonesolver.solve_tone` call, fanned out by
:func:`~maccanon._parallel.map_indexed`.

"""

import dataclasses
import itertools
import logging
import math
import warnings

import numpy as np

from ._ellipsoid import (
    EllipsoidState,
    ellipsoid_step,
    project_orthant,
    stop_metric,
)
from ._errors import (
    NonConvergenceError,
    UnboundedToneError,
    ValidationError,
    raise_collected,
)
from ._hull import VertexSet, timeshare_lp
from ._model import ChannelSet, CovariancePlan
from ._options import DEFAULT_OPTIONS
from ._parallel import map_indexed
from ._ratecalc import (
    WeightVector,
    greedy_order,
    rate_allocation,
    received_covariances,
    sic_rates_from_q,
)
from ._tonesolver import ToneProblem, solve_tone
from ._tools import leaves, split

logger = logging.getLogger(__name__)

FLAG_INFEASIBLE = 0
FLAG_SINGLE = 1
FLAG_TIMESHARE = 2


@dataclasses.dataclass
class SolveReport:
    """The outcome of a solver run.

    Attributes:
      problem (str): ``"maxrmac"``, ``"minpmac"``, ``"maxresmac"`` or
        ``"admmac"``.
      flag (int): 0 infeasible, 1 one decoding order suffices, 2 time
        sharing is required.
      plans (list): Covariance plans; ``allocations[k]`` was computed from
        ``plans[allocations[k].plan_index]``.
      allocations (list): One :class:`RateAllocation` per decoding order
        used.
      alpha (numpy.ndarray): Fraction of time each allocation is used.
      energies (numpy.ndarray): Per-user energies, averaged with ``alpha``.
      theta, w: Final dual variables (either may be None).
      trace (list): Stop metric per outer iteration.
      budget (dict): The problem data (``E``, ``E_T``, ``b_min`` or ``b``).

    """

    problem: str
    flag: int
    plans: list
    allocations: list
    alpha: np.ndarray
    energies: np.ndarray
    theta: np.ndarray = None
    w: np.ndarray = None
    trace: list = dataclasses.field(default_factory=list)
    iterations: int = 0
    objective: float = 0.0
    budget: dict = dataclasses.field(default_factory=dict)

    @property
    def plan(self):
        return self.plans[0]

    @property
    def rates(self):
        """Per-user rates averaged over the time-sharing mixture."""
        totals = np.array([alloc.totals for alloc in self.allocations])
        return np.asarray(self.alpha) @ totals

    @property
    def orders(self):
        return [alloc.order for alloc in self.allocations]


################################################################
# Shared pieces
################################################################


def _vector(values, size, field, *, positive=False):
    values = np.array(values, dtype=float)
    if values.ndim == 0:
        values = np.full(size, float(values))
    if values.shape != (size,):
        raise ValidationError(
            "{} needs {} entries, got shape {}".format(
                field, size, values.shape
            ),
            field=field,
        )
    if not np.all(np.isfinite(values)):
        raise ValidationError("{} must be finite".format(field), field=field)
    if positive and np.any(values <= 0):
        raise ValidationError("{} must be > 0".format(field), field=field)
    if np.any(values < 0):
        raise ValidationError("{} must be >= 0".format(field), field=field)
    return values


def _weights(theta, size):
    theta = _vector(
        theta.theta if isinstance(theta, WeightVector) else theta,
        size,
        "theta",
    )
    if not np.any(theta):
        raise ValidationError("at least one weight must be positive",
                              field="theta")
    return theta


def _restrict(ch, users):
    return ChannelSet([[tone[u] for u in users] for tone in ch.H], c_b=ch.c_b)


def _embed(ch, users, covariances, factors):
    """Full-size plan with zero covariances for users not in ``users``."""
    R, F = [], []
    for n in range(ch.num_tones):
        tone_R = [np.zeros((lx, lx), dtype=complex) for lx in ch.tx_antennas]
        tone_F = [np.zeros((lx, lx), dtype=complex) for lx in ch.tx_antennas]
        for i, u in enumerate(users):
            tone_R[u] = covariances[n][i]
            tone_F[u] = factors[n][i]
        R.append(tone_R)
        F.append(tone_F)
    return CovariancePlan(R, factors=F)


def _full_order(num_users, users, order):
    """Map an order over ``users`` to all users, idle users first."""
    idle = [u for u in range(num_users) if u not in users]
    return tuple(idle + [users[i] for i in order])


class ToneBank:
    """Solves every tone of ``ch`` at given duals with warm starts.

    Args:
      ch (ChannelSet): The (possibly restricted) channel.
      key: Hashable label for this user set, part of the cache key.
      options (SolverOptions): Inner settings and worker count.
      cache (dict): Maps ``(key, tone)`` to the last factors; share it
        between solves to warm-start them.

    """

    def __init__(self, ch, key, options, cache=None):
        self.ch = ch
        self.key = key
        self.options = options
        self.cache = {} if cache is None else cache

    def solve(self, theta, w):
        def job(n):
            problem = ToneProblem.for_tone(self.ch, n, theta, w)
            solution = solve_tone(
                problem, self.cache.get((self.key, n)), self.options
            )
            self.cache[(self.key, n)] = solution.factors
            return solution

        return map_indexed(job, self.ch.num_tones, self.options.workers)


def _energies(solutions):
    return np.sum(
        [[np.sum(np.abs(b) ** 2) for b in s.factors] for s in solutions],
        axis=0,
    )


def _rates(ch, solutions, order):
    return np.sum(
        [
            sic_rates_from_q(
                received_covariances(ch.tone(n), s.covariances), order,
                ch.c_b,
            )
            for n, s in enumerate(solutions)
        ],
        axis=0,
    )


def _unbounded_users(exc):
    """Users named by the UnboundedToneErrors in ``exc``; re-raises the
    rest."""
    unbounded, rest = split(UnboundedToneError, exc)
    if rest is not None:
        raise rest
    return sorted({u for leaf in leaves(unbounded) for u in leaf.users})


@dataclasses.dataclass
class _OuterResult:
    payload: object
    center: np.ndarray
    trace: list
    iterations: int
    converged: bool


def _ellipsoid_search(state, evaluate, eps, cap, radius, options, name):
    """Run central cuts from ``state`` until the stop metric meets ``eps``.

    ``evaluate(center)`` returns ``(g, payload)``; a None payload marks a
    feasibility cut that is not a candidate solution. The candidate with
    the smallest stop metric is kept for plateaus and for the cap.

    """
    trace = []
    best = None
    for iteration in range(1, cap + 1):
        state = project_orthant(state, options.max_orthant_cuts)
        center = state.center.copy()
        g, payload = evaluate(center)
        if payload is None:
            state = ellipsoid_step(state, g)
            continue
        metric = stop_metric(state, g)
        trace.append(metric)
        if best is None or metric < best[0]:
            best = (metric, payload, center)
        logger.debug("%s iteration %d: metric %.3e (eps %.3e)", name,
                     iteration, metric, eps)
        if metric <= eps:
            return _OuterResult(payload, center, trace, iteration, True)
        if np.max(np.diag(state.shape)) < 1e-24 * radius ** 2:
            warnings.warn(
                "{}: ellipsoid collapsed at stop metric {:.3g} > {:.3g}; "
                "reporting the best iterate".format(name, best[0], eps),
                RuntimeWarning,
            )
            return _OuterResult(best[1], best[2], trace, iteration, True)
        state = ellipsoid_step(state, g)
    if best is None:
        return _OuterResult(None, state.center, trace, cap, False)
    return _OuterResult(best[1], best[2], trace, cap, False)


def _rescale(energies, budget):
    scales = np.ones_like(energies)
    for u, (have, want) in enumerate(zip(energies, budget)):
        if have <= 1e-12 * want:
            warnings.warn(
                "user {} spends negligible energy ({:.3g}); skipping its "
                "rescale".format(u, have),
                RuntimeWarning,
            )
        else:
            scales[u] = want / have
    return scales


def cluster_users(theta, tol=1e-3):
    """Group users whose weights agree within ``tol * (1 + max(theta))``.

    Single linkage over the sorted weights, so chains of close weights
    merge. Clusters come in descending weight, each sorted by user index.

    """
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        return []
    threshold = tol * (1 + np.max(theta))
    ranked = sorted(range(theta.size), key=lambda u: (-theta[u], u))
    clusters = [[ranked[0]]]
    for previous, user in zip(ranked, ranked[1:]):
        if theta[previous] - theta[user] <= threshold:
            clusters[-1].append(user)
        else:
            clusters.append([user])
    return [tuple(sorted(c)) for c in clusters]


def orderings(theta, options=DEFAULT_OPTIONS, tol=None):
    """Decoding orders consistent with the clusters of ``theta``.

    Clusters are decoded from lowest to highest weight; inside a cluster
    every permutation is allowed. The greedy order always comes first.
    Above ``options.max_orderings`` a seeded random sample is returned
    with a RuntimeWarning.

    """
    tol = options.cluster_tol if tol is None else tol
    blocks = list(reversed(cluster_users(theta, tol)))
    first = greedy_order(theta)
    total = math.prod(math.factorial(len(block)) for block in blocks)
    if total <= options.max_orderings:
        orders = [first]
        for combo in itertools.product(
            *(itertools.permutations(block) for block in blocks)
        ):
            order = tuple(u for part in combo for u in part)
            if order != first:
                orders.append(order)
        return orders
    warnings.warn(
        "{} decoding orders exceed the cap of {}; sampling".format(
            total, options.max_orderings
        ),
        RuntimeWarning,
    )
    rng = np.random.default_rng(options.seed)
    orders, seen = [first], {first}
    while len(orders) < options.max_orderings:
        order = tuple(
            int(u) for block in blocks for u in rng.permutation(block)
        )
        if order not in seen:
            seen.add(order)
            orders.append(order)
    return orders


def _zero_report(problem, ch, theta, w, budget):
    plan = CovariancePlan.zeros(ch)
    order = greedy_order(theta) if theta is not None else tuple(
        range(ch.num_users)
    )
    return SolveReport(
        problem=problem,
        flag=FLAG_SINGLE,
        plans=[plan],
        allocations=[rate_allocation(ch, plan, order)],
        alpha=np.ones(1),
        energies=np.zeros(ch.num_users),
        theta=None if theta is None else np.asarray(theta, dtype=float),
        w=None if w is None else np.asarray(w, dtype=float),
        budget=budget,
    )


################################################################
# Weighted rate sum under per-user budgets
################################################################


def max_rmac(ch, E, theta, options=DEFAULT_OPTIONS, *, init_w=None,
             cache=None):
    """Maximize ``sum(theta[u] * b[u])`` with ``E[u]`` energy per user.

    Args:
      ch (ChannelSet): The channel.
      E: Per-user energy budgets (all > 0).
      theta: Rate weights (>= 0, not all zero).
      options (SolverOptions): Tunables.
      init_w: Optional starting multipliers (center of the first ball).
      cache (dict): Optional warm-start cache shared across calls.

    Returns:
      SolveReport: flag 1, one plan whose energies equal the budgets, and
      its rates under the greedy order of ``theta``. Users with zero
      weight or an all-zero channel get no energy.

    Raises:
      NonConvergenceError: the iteration cap (``iteration_cap * U**2``)
          was reached; ``best`` holds the report of the best iterate.
      NumericalBreakdown: the ellipsoid degenerated.

    """
    ch.require_mac()
    E = _vector(E, ch.num_users, "E", positive=True)
    theta = _weights(theta, ch.num_users)
    budget = {"E": E.tolist()}
    users = [u for u in range(ch.num_users)
             if theta[u] > 0 and not ch.user_is_silent(u)]
    if not users:
        return _zero_report("maxrmac", ch, theta, np.zeros(ch.num_users),
                            budget)

    sub = _restrict(ch, users)
    sub_theta, sub_E = theta[users], E[users]
    bank = ToneBank(sub, tuple(users), options, cache)
    U = len(users)
    top = float(np.max(sub_theta))
    radius = options.radius_factor * top
    if init_w is None:
        center = np.full(U, top)
    else:
        center = _vector(init_w, ch.num_users, "init_w")[users]
    state = EllipsoidState.ball(center, radius)

    def evaluate(w):
        try:
            solutions = bank.solve(sub_theta, w)
        except Exception as exc:
            g = np.zeros(U)
            g[_unbounded_users(exc)] = -1.0
            return g, None
        return sub_E - _energies(solutions), solutions

    outer = _ellipsoid_search(
        state,
        evaluate,
        options.outer_tol * np.linalg.norm(sub_E),
        options.iteration_cap * U * U,
        radius,
        options,
        "max_rmac",
    )

    def finish(result):
        solutions = result.payload
        scales = _rescale(_energies(solutions), sub_E)
        sub_plan_R = [[r * scales[i] for i, r in enumerate(s.covariances)]
                      for s in solutions]
        roots = np.sqrt(scales)
        sub_factors = [[b * roots[i] for i, b in enumerate(s.factors)]
                       for s in solutions]
        plan = _embed(ch, users, sub_plan_R, sub_factors)
        allocation = rate_allocation(ch, plan, greedy_order(theta))
        w = np.zeros(ch.num_users)
        w[users] = result.center
        return SolveReport(
            problem="maxrmac",
            flag=FLAG_SINGLE,
            plans=[plan],
            allocations=[allocation],
            alpha=np.ones(1),
            energies=plan.energies(),
            theta=theta,
            w=w,
            trace=result.trace,
            iterations=result.iterations,
            objective=float(theta @ allocation.totals),
            budget=budget,
        )

    if not outer.converged:
        best = finish(outer) if outer.payload is not None else None
        raise NonConvergenceError(
            "max_rmac did not converge in {} iterations".format(
                outer.iterations
            ),
            best=best,
        )
    report = finish(outer)
    logger.info("max_rmac: %d iterations, weighted rate %.6g",
                report.iterations, report.objective)
    return report


################################################################
# Weighted sum energy that supports target rates
################################################################


def _support(ch, plan, orders, b_min):
    """How ``plan`` meets ``b_min``: one order, a mixture, or not at all.

    Returns ``(flag, allocations, alpha)`` or None. Flag 2 always comes
    with at least two allocations and strictly positive fractions.

    """
    allocations = [rate_allocation(ch, plan, order) for order in orders]
    alpha = timeshare_lp(
        VertexSet([a.totals for a in allocations]), b_min
    )
    if alpha is None:
        return None
    keep = np.flatnonzero(alpha > 0)
    if len(keep) == 1:
        return FLAG_SINGLE, [allocations[keep[0]]], np.ones(1)
    return (
        FLAG_TIMESHARE,
        [allocations[k] for k in keep],
        alpha[keep] / alpha[keep].sum(),
    )


def _reachable_sum_rate(ch, key, w, options):
    """Sum rate at the equal rate weight ``reach_factor * max(w)``.

    Targets whose total exceeds it are outside what the dual search can
    reach and are reported infeasible up front.

    """
    theta = np.full(ch.num_users, options.reach_factor * float(np.max(w)))
    solutions = ToneBank(ch, key, options).solve(theta, w)
    return float(np.sum(_rates(ch, solutions, tuple(range(ch.num_users)))))


def _polish(ch, plan, orders, b_min, limit):
    """Smallest common scale ``t`` in ``[1, limit]`` at which ``plan``
    supports ``b_min``; returns ``(t, support)`` or None."""
    found = _support(ch, plan, orders, b_min)
    if found is not None:
        return 1.0, found
    found = _support(ch, plan.scaled(limit), orders, b_min)
    if found is None:
        return None
    lo, hi = 1.0, limit
    for _ in range(60):
        if hi - lo <= 1e-12:
            break
        mid = (lo + hi) / 2
        attempt = _support(ch, plan.scaled(mid), orders, b_min)
        if attempt is None:
            lo = mid
        else:
            hi, found = mid, attempt
    return hi, found


def min_pmac(ch, b_min, w, options=DEFAULT_OPTIONS, *, cache=None):
    """Minimize ``sum(w[u] * E[u])`` subject to rates ``b >= b_min``.

    The ellipsoid searches the rate weights ``theta``. At convergence the
    users are clustered by ``theta``, every within-cluster decoding order
    is evaluated, and the covariances are scaled by the smallest common
    factor in ``[1, polish_limit]`` that lets one order (flag 1) or a
    time-sharing mixture (flag 2) meet ``b_min``. Otherwise the flag is 0.

    Raises:
      NonConvergenceError: the iteration cap was reached.

    """
    ch.require_mac()
    b_min = _vector(b_min, ch.num_users, "b_min")
    w = _vector(w, ch.num_users, "w", positive=True)
    budget = {"b_min": b_min.tolist(), "w": w.tolist()}
    if not np.any(b_min):
        return _zero_report("minpmac", ch, np.zeros(ch.num_users), w,
                            budget)

    silent = [u for u in range(ch.num_users)
              if b_min[u] > 0 and ch.user_is_silent(u)]
    if silent:
        logger.info("min_pmac: users %s need rate but have no channel",
                    silent)
        report = _zero_report("minpmac", ch, np.zeros(ch.num_users), w,
                              budget)
        report.flag = FLAG_INFEASIBLE
        return report

    users = [u for u in range(ch.num_users) if b_min[u] > 0]
    sub = _restrict(ch, users)
    sub_b, sub_w = b_min[users], w[users]
    reach = _reachable_sum_rate(sub, ("reach",) + tuple(users), sub_w,
                                options)
    if np.sum(sub_b) > reach:
        logger.info("min_pmac: target sum %.6g exceeds the reachable sum "
                    "rate %.6g", np.sum(sub_b), reach)
        report = _zero_report("minpmac", ch, np.zeros(ch.num_users), w,
                              budget)
        report.flag = FLAG_INFEASIBLE
        return report

    bank = ToneBank(sub, tuple(users), options, cache)
    U = len(users)
    top = float(np.max(sub_w))
    radius = options.radius_factor * top
    state = EllipsoidState.ball(np.full(U, top), radius)

    def evaluate(theta):
        solutions = bank.solve(theta, sub_w)
        rates = _rates(sub, solutions, greedy_order(theta))
        return rates - sub_b, solutions

    outer = _ellipsoid_search(
        state,
        evaluate,
        options.outer_tol * np.linalg.norm(sub_b),
        options.iteration_cap * U * U,
        radius,
        options,
        "min_pmac",
    )

    def finish(result):
        solutions = result.payload
        sub_theta = result.center
        sub_plan = CovariancePlan(
            [s.covariances for s in solutions],
            factors=[s.factors for s in solutions],
        )
        polished = None
        for tol in (options.cluster_tol, 10 * options.cluster_tol,
                    100 * options.cluster_tol):
            orders = orderings(sub_theta, options, tol)
            polished = _polish(sub, sub_plan, orders, sub_b,
                               options.polish_limit)
            if polished is not None:
                break
        if polished is None:
            scale = 1.0
            flag = FLAG_INFEASIBLE
            sub_orders, alpha = [greedy_order(sub_theta)], np.ones(1)
        else:
            scale, (flag, allocations, alpha) = polished
            sub_orders = [a.order for a in allocations]
        root = np.sqrt(scale)
        plan = _embed(
            ch,
            users,
            [[r * scale for r in s.covariances] for s in solutions],
            [[b * root for b in s.factors] for s in solutions],
        )
        allocations = [
            rate_allocation(ch, plan, _full_order(ch.num_users, users, o))
            for o in sub_orders
        ]
        theta = np.zeros(ch.num_users)
        theta[users] = sub_theta
        energies = plan.energies()
        return SolveReport(
            problem="minpmac",
            flag=flag,
            plans=[plan],
            allocations=allocations,
            alpha=alpha,
            energies=energies,
            theta=theta,
            w=w,
            trace=result.trace,
            iterations=result.iterations,
            objective=float(w @ energies),
            budget=budget,
        )

    if not outer.converged:
        raise NonConvergenceError(
            "min_pmac did not converge in {} iterations".format(
                outer.iterations
            ),
            best=finish(outer) if outer.payload is not None else None,
        )
    report = finish(outer)
    logger.info("min_pmac: flag %d after %d iterations, weighted energy "
                "%.6g", report.flag, report.iterations, report.objective)
    return report


################################################################
# Weighted rate sum under a sum-energy budget
################################################################


def max_resmac(ch, E_T, theta, options=DEFAULT_OPTIONS, *, cache=None):
    """Maximize ``sum(theta[u] * b[u])`` with total energy ``E_T``.

    The dual has one multiplier ``lam`` shared by all users, and the total
    energy spent at ``lam`` is non-increasing in it, so ``lam`` is found
    by bisection on the geometric mean of a bracket.

    Raises:
      NonConvergenceError: no bracket was found within
          ``max_bracket_expansions`` expansions, or the lower end would
          drop to ``w_floor``.

    """
    ch.require_mac()
    E_T = float(E_T)
    if not np.isfinite(E_T) or E_T <= 0:
        raise ValidationError("total energy must be > 0", field="E_T")
    theta = _weights(theta, ch.num_users)
    budget = {"E_T": E_T}
    users = [u for u in range(ch.num_users)
             if theta[u] > 0 and not ch.user_is_silent(u)]
    if not users:
        return _zero_report("maxresmac", ch, theta, np.zeros(ch.num_users),
                            budget)
    sub = _restrict(ch, users)
    sub_theta = theta[users]
    bank = ToneBank(sub, tuple(users), options, cache)

    probes = []
    trace = []
    warned = []

    def spend(lam):
        solutions = bank.solve(sub_theta, lam)
        total = float(np.sum(_energies(solutions)))
        for other, other_total in probes:
            rise = (total - other_total) * np.sign(lam - other)
            if rise > options.bisection_rel_tol * E_T and not warned:
                warned.append(lam)
                warnings.warn(
                    "max_resmac: total energy increased with the "
                    "multiplier ({:.6g} at {:.3g} vs {:.6g} at {:.3g})".format(
                        total, lam, other_total, other
                    ),
                    RuntimeWarning,
                )
        probes.append((lam, total))
        trace.append(abs(total - E_T) / E_T)
        return total, solutions

    lo, hi = options.bracket
    lo_total, solutions = spend(lo)
    expansions = 0
    while lo_total < E_T:
        # below w_floor the tone subproblems are unbounded
        if (expansions == options.max_bracket_expansions
                or lo / 10 <= options.w_floor):
            raise NonConvergenceError(
                "max_resmac: no multiplier above {:.3g} spends {:.6g}".format(
                    options.w_floor, E_T
                )
            )
        lo /= 10
        lo_total, solutions = spend(lo)
        expansions += 1
    hi_total, _ = spend(hi)
    while hi_total > E_T:
        if expansions == options.max_bracket_expansions:
            raise NonConvergenceError(
                "max_resmac: no multiplier spends as little as "
                "{:.6g}".format(E_T)
            )
        hi *= 10
        hi_total, _ = spend(hi)
        expansions += 1

    lam, total = lo, lo_total
    while True:
        if abs(total - E_T) <= options.bisection_rel_tol * E_T:
            break
        if np.log(hi / lo) <= options.bisection_log_width:
            break
        lam = np.sqrt(lo * hi)
        total, solutions = spend(lam)
        logger.debug("max_resmac: lam %.6g spends %.6g", lam, total)
        if total > E_T:
            lo = lam
        else:
            hi = lam

    if total <= 0:
        raise NonConvergenceError(
            "max_resmac: the final multiplier spends no energy"
        )
    scale = E_T / total
    root = np.sqrt(scale)
    plan = _embed(
        ch,
        users,
        [[r * scale for r in s.covariances] for s in solutions],
        [[b * root for b in s.factors] for s in solutions],
    )
    allocation = rate_allocation(ch, plan, greedy_order(theta))
    w = np.zeros(ch.num_users)
    w[users] = lam
    report = SolveReport(
        problem="maxresmac",
        flag=FLAG_SINGLE,
        plans=[plan],
        allocations=[allocation],
        alpha=np.ones(1),
        energies=plan.energies(),
        theta=theta,
        w=w,
        trace=trace,
        iterations=len(probes),
        objective=float(theta @ allocation.totals),
        budget=budget,
    )
    logger.info("max_resmac: %d probes, multiplier %.6g, weighted rate "
                "%.6g", len(probes), lam, report.objective)
    return report


################################################################
# Re-validation
################################################################


def check_report(ch, report, rate_tol=1e-6, energy_tol=1e-9):
    """Recompute a report's rates and energies from its covariances.

    Raises:
      ValidationError: (or an ErrorGroup of them) for every allocation
          whose rates differ from the recomputed ones by more than
          ``rate_tol``, and if the energies differ from the traces by
          more than ``energy_tol`` (relative).

    """
    failures = []
    if len(report.alpha) != len(report.allocations):
        raise ValidationError("one fraction per allocation is required",
                              field="alpha")
    energies = np.zeros(ch.num_users)
    for k, (fraction, allocation) in enumerate(
        zip(report.alpha, report.allocations)
    ):
        plan = report.plans[allocation.plan_index]
        plan.check_against(ch)
        energies += fraction * plan.energies()
        fresh = rate_allocation(ch, plan, allocation.order)
        error = np.max(np.abs(fresh.b - allocation.b))
        if error > rate_tol:
            where = "allocations[{}]".format(k)
            failures.append((where, ValidationError(
                "{}: stored rates differ from recomputed ones by "
                "{:.3g}".format(where, error),
                field=where,
            )))
    scale = 1 + np.max(np.abs(energies))
    if np.max(np.abs(energies - report.energies)) > energy_tol * scale:
        failures.append(("energies", ValidationError(
            "stored energies {} do not match covariance traces {}".format(
                np.asarray(report.energies).tolist(), energies.tolist()
            ),
            field="energies",
        )))
    raise_collected("report does not re-validate", failures)
