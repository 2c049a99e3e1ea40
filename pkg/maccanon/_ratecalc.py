"""Successive-interference-cancellation rates and polymatroid bounds."""

import itertools

import numpy as np
import scipy.linalg

from ._errors import NumericalBreakdown, ValidationError
from ._model import CovariancePlan, RateAllocation

# Rates below this are reported as exact zeros.
RATE_FLOOR = 1e-12


class WeightVector:
    """Nonnegative per-user rate weights and their sorted differences.

    Args:
      theta: One nonnegative weight per user.

    Attributes:
      sigma (tuple): Users by descending weight (ties: larger index
        first), i.e. the reverse of :func:`greedy_order`.
      deltas (numpy.ndarray): ``theta[sigma[k]] - theta[sigma[k+1]]``,
        with a trailing zero weight, so they sum to ``max(theta)``.

    """

    def __init__(self, theta):
        if isinstance(theta, WeightVector):
            theta = theta.theta
        theta = np.array(theta, dtype=float)
        if theta.ndim != 1 or theta.size == 0:
            raise ValidationError("weights must be a nonempty vector",
                                  field="theta")
        if not np.all(np.isfinite(theta)) or np.any(theta < 0):
            raise ValidationError("weights must be finite and nonnegative",
                                  field="theta")
        theta.setflags(write=False)
        self._theta = theta
        self.order = greedy_order(theta)
        self.sigma = self.order[::-1]
        sorted_theta = theta[list(self.sigma)]
        deltas = sorted_theta - np.append(sorted_theta[1:], 0.0)
        deltas.setflags(write=False)
        self.deltas = deltas

    @property
    def theta(self):
        return self._theta

    @property
    def num_users(self):
        return self._theta.size

    def __repr__(self):
        return "WeightVector({})".format(self._theta.tolist())


def greedy_order(theta):
    """Decoding order that maximizes ``sum(theta[u] * b[u])``.

    Users are decoded by ascending weight, so the heaviest user is decoded
    last and sees no interference. Equal weights are decoded in ascending
    user index.

    """
    if isinstance(theta, WeightVector):
        return theta.order
    theta = np.asarray(theta, dtype=float)
    return tuple(int(u) for u in np.lexsort((np.arange(theta.size), theta)))


def log2det(matrix):
    """``log2 det(matrix)`` for a Hermitian positive definite matrix."""
    try:
        factor, _ = scipy.linalg.cho_factor(matrix, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(
            "log-det argument is not positive definite"
        ) from exc
    return 2.0 * np.sum(np.log(np.abs(np.diag(factor)))) / np.log(2.0)


def received_covariances(H_tone, R_tone):
    """``Q[u] = H[u] @ R[u] @ H[u]^H`` for one tone."""
    return [h @ r @ h.conj().T for h, r in zip(H_tone, R_tone)]


def _as_plan(plan):
    if isinstance(plan, CovariancePlan):
        return plan
    return CovariancePlan(plan)


def _check_order(order, num_users):
    order = tuple(int(u) for u in order)
    if sorted(order) != list(range(num_users)):
        raise ValidationError(
            "order {} is not a permutation of {} users".format(
                order, num_users
            ),
            field="order",
        )
    return order


def sic_rates_from_q(Q, order, c_b):
    """SIC rates of one tone from its received covariances (unchecked)."""
    rx = Q[0].shape[0]
    S = np.eye(rx, dtype=complex)
    previous = 0.0
    rates = np.zeros(len(Q))
    for user in reversed(order):
        S = S + Q[user]
        current = log2det(S)
        rates[user] = (current - previous) / c_b
        previous = current
    rates[rates < RATE_FLOOR] = 0.0
    return rates


def sic_rates(ch, plan, order, tone):
    """Per-user rates on ``tone`` when users are decoded in ``order``.

    ``order[0]`` is decoded first and therefore sees every other user as
    interference; the last user sees none. The rates telescope, so their
    sum is the full-set bound ``log2 det(I + sum(Q)) / c_b``.

    Raises:
      ValidationError: if ``plan`` is not Hermitian PSD or ``order`` is
          not a permutation.

    """
    ch.require_mac()
    plan = _as_plan(plan)
    order = _check_order(order, ch.num_users)
    Q = received_covariances(ch.tone(tone), plan.tone(tone))
    return sic_rates_from_q(Q, order, ch.c_b)


def polymatroid_bound(ch, plan, subset, tone):
    """``log2 det(I + sum_{u in subset} Q[u]) / c_b`` on ``tone``."""
    ch.require_mac()
    subset = sorted(set(int(u) for u in subset))
    if not subset:
        raise ValidationError("subset must not be empty", field="subset")
    if subset[0] < 0 or subset[-1] >= ch.num_users:
        raise ValidationError(
            "subset {} has users outside 0..{}".format(
                subset, ch.num_users - 1
            ),
            field="subset",
        )
    plan = _as_plan(plan)
    H_tone, R_tone = ch.tone(tone), plan.tone(tone)
    S = np.eye(ch.rx_antennas, dtype=complex)
    for u in subset:
        S = S + H_tone[u] @ R_tone[u] @ H_tone[u].conj().T
    return log2det(S) / ch.c_b


def polymatroid_violation(ch, plan, rates, tone):
    """Largest excess of ``sum(rates[S])`` over the bound of ``S``.

    Checks all ``2**U - 1`` nonempty subsets; a result at or below zero
    means ``rates`` lies in the tone's rate polymatroid.

    """
    rates = np.asarray(rates, dtype=float)
    worst = -np.inf
    users = range(ch.num_users)
    for size in range(1, ch.num_users + 1):
        for subset in itertools.combinations(users, size):
            excess = rates[list(subset)].sum() - polymatroid_bound(
                ch, plan, subset, tone
            )
            worst = max(worst, excess)
    return worst


def weighted_rate_identity(ch, plan, theta, tone):
    """Both sides of the summation-by-parts identity on one tone.

    Returns:
      ``(lhs, rhs)`` where ``lhs`` is ``sum(theta[u] * b[u])`` under the
      greedy order and ``rhs`` is ``sum_k deltas[k] * log2 det(S_k) /
      c_b`` with ``S_k`` accumulating the ``k`` heaviest users.

    """
    weights = WeightVector(theta)
    rates = sic_rates(ch, plan, weights.order, tone)
    lhs = float(np.dot(weights.theta, rates))
    plan = _as_plan(plan)
    Q = received_covariances(ch.tone(tone), plan.tone(tone))
    S = np.eye(ch.rx_antennas, dtype=complex)
    rhs = 0.0
    for delta, user in zip(weights.deltas, weights.sigma):
        S = S + Q[user]
        if delta > 0:
            rhs += delta * log2det(S)
    return lhs, rhs / ch.c_b


def rate_allocation(ch, plan, order, plan_index=0):
    """SIC rates on every tone under one order, as a RateAllocation."""
    ch.require_mac()
    plan = _as_plan(plan)
    order = _check_order(order, ch.num_users)
    b = np.array([
        sic_rates_from_q(
            received_covariances(ch.tone(n), plan.tone(n)), order, ch.c_b
        )
        for n in range(ch.num_tones)
    ])
    return RateAllocation(b, order, plan_index)
