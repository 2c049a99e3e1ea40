"""Independent reference solutions, used to check the solvers.

Nothing here shares code with the tone solver; the brute-force solver
works on covariances directly and differentiates the SIC rates itself.

"""

import dataclasses
import logging

import numpy as np

from ._errors import ValidationError
from ._hull import _as_points, simplex_phase_one
from ._parallel import map_indexed
from ._ratecalc import greedy_order

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class Waterfill:
    powers: np.ndarray
    rate: float
    level: float


def waterfill(H, E, c_b=1):
    """Single-user rate maximization in closed form.

    Args:
      H: One channel matrix, or a sequence of them (one per tone) that
        share the energy ``E``.
      E (float): Energy budget (> 0).
      c_b (int): Baseband constant.

    Returns:
      Waterfill: the power of every eigenmode (tones in order, gains of
      each tone ascending), the rate, and the water level ``mu`` with
      ``sum(max(0, mu - 1/g)) == E``.

    """
    if E <= 0:
        raise ValidationError("energy must be > 0", field="E")
    matrices = [H] if np.ndim(H) == 2 else list(H)
    gains = np.concatenate([
        np.clip(np.linalg.eigvalsh(np.conj(np.transpose(h)) @ h).real, 0,
                None)
        for h in (np.asarray(m, dtype=complex) for m in matrices)
    ])
    powers = np.zeros_like(gains)
    strongest = np.max(gains) if gains.size else 0.0
    usable = np.flatnonzero(gains > 1e-12 * strongest) if strongest else []
    if len(usable) == 0:
        return Waterfill(powers, 0.0, 0.0)

    ranked = usable[np.argsort(-gains[usable], kind="stable")]
    inverse = 1.0 / gains[ranked]
    level = 0.0
    for count in range(len(ranked), 0, -1):
        level = (E + inverse[:count].sum()) / count
        if level > inverse[count - 1]:
            break
    powers[ranked] = np.clip(level - inverse, 0, None)
    rate = np.sum(np.log2(np.maximum(1.0, level * gains[usable]))) / c_b
    return Waterfill(powers, float(rate), float(level))


def exact_membership(V, target, tol=1e-9):
    """Exact test of ``target`` in the convex hull of ``V``.

    Solves ``alpha >= 0, sum(alpha) == 1, V^T alpha == target`` (equality
    rows, unlike the inequality form of the time-sharing LP).

    """
    points = _as_points(V)
    target = np.asarray(target, dtype=float)
    A = np.vstack([points.T, np.ones(len(points))])
    return simplex_phase_one(A, np.append(target, 1.0), tol) is not None


@dataclasses.dataclass(frozen=True)
class BruteProblem:
    """What :func:`brute_solve` maximizes.

    ``kind`` is ``"maxrmac"`` (per-user ``energies``) or ``"maxresmac"``
    (one ``total``); the objective is ``sum(theta[u] * b[u])``.

    """

    kind: str
    theta: tuple
    energies: tuple = None
    total: float = None


def _objective_and_gradient(H, R, theta, order, c_b):
    """Weighted SIC rate sum of one tone and its gradient in ``R``."""
    rx = H[0].shape[0]
    value = 0.0
    grads = [np.zeros_like(r) for r in R]
    suffixes = [order[k:] for k in range(len(order))] + [()]
    inverses = []
    logdets = []
    for suffix in suffixes:
        S = np.eye(rx, dtype=complex)
        for u in suffix:
            S += H[u] @ R[u] @ H[u].conj().T
        sign, logdet = np.linalg.slogdet(S)
        logdets.append(logdet / np.log(2))
        inverses.append(np.linalg.inv(S))
    for k, user in enumerate(order):
        value += theta[user] * (logdets[k] - logdets[k + 1])
        for u in suffixes[k]:
            grads[u] += theta[user] * (H[u].conj().T @ inverses[k] @ H[u])
        for u in suffixes[k + 1]:
            grads[u] -= theta[user] * (
                H[u].conj().T @ inverses[k + 1] @ H[u]
            )
    scale = 1.0 / c_b
    return value * scale, [g * scale / np.log(2) for g in grads]


def _psd_part(R):
    values, vectors = np.linalg.eigh((R + R.conj().T) / 2)
    return (vectors * np.clip(values, 0, None)) @ vectors.conj().T


def _fit_budget(R, problem):
    """Scale covariances so the energy budget is spent exactly."""
    energies = np.array([
        sum(np.trace(tone[u]).real for tone in R) for u in range(len(R[0]))
    ])
    if problem.kind == "maxrmac":
        target = np.asarray(problem.energies, dtype=float)
        scales = np.where(energies > 0, target / np.where(
            energies > 0, energies, 1.0), 0.0)
    else:
        total = energies.sum()
        scales = np.full(energies.size,
                         problem.total / total if total > 0 else 0.0)
    return [[r * scales[u] for u, r in enumerate(tone)] for tone in R]


def brute_solve(ch, problem, *, restarts=50, iterations=20000, seed=0,
                workers=1):
    """Best objective found by projected gradient ascent on covariances.

    Every restart draws random covariances that spend the budget, then
    takes normalized gradient steps annealed as ``1 / (1 + t / 500)``,
    projecting onto the PSD cone (eigenvalue clipping) and back onto the
    budget (scaling). Restart ``i`` uses the seed ``[seed, i]``. Only
    meant for tiny channels (``U, N, L_x <= 2``).

    """
    if problem.kind not in ("maxrmac", "maxresmac"):
        raise ValidationError("unknown problem kind {!r}".format(
            problem.kind), field="kind")
    theta = np.asarray(problem.theta, dtype=float)
    order = greedy_order(theta)
    if problem.kind == "maxrmac":
        budget = float(np.max(problem.energies))
    else:
        budget = float(problem.total)
    if budget <= 0:
        return 0.0
    step0 = 0.2 * budget / ch.num_tones

    def evaluate(R):
        value = 0.0
        grads = []
        for n in range(ch.num_tones):
            v, g = _objective_and_gradient(ch.tone(n), R[n], theta, order,
                                           ch.c_b)
            value += v
            grads.append(g)
        return value, grads

    def restart(i):
        rng = np.random.default_rng([seed, i])
        R = []
        for _ in range(ch.num_tones):
            tone = []
            for lx in ch.tx_antennas:
                A = rng.standard_normal((lx, lx)) + 1j * rng.standard_normal(
                    (lx, lx))
                if ch.c_b == 2:
                    A = A.real.astype(complex)
                tone.append(A @ A.conj().T)
            R.append(tone)
        R = _fit_budget(R, problem)
        best, grads = evaluate(R)
        for t in range(iterations):
            norm = np.sqrt(sum(
                np.sum(np.abs(g) ** 2) for tone in grads for g in tone
            ))
            if norm == 0:
                break
            step = step0 / (1 + t / 500) / norm
            R = _fit_budget(
                [[_psd_part(r + step * g) for r, g in zip(tone, tg)]
                 for tone, tg in zip(R, grads)],
                problem,
            )
            value, grads = evaluate(R)
            best = max(best, value)
        return best

    values = map_indexed(restart, restarts, workers, label="restart")
    logger.debug("brute_solve restarts: %s", np.round(values, 6).tolist())
    return float(max(values))
