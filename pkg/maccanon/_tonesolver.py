"""The per-tone Lagrangian and its inner maximizer.

For one tone with weight differences ``deltas`` (users sorted by
descending weight into ``sigma``) and energy multipliers ``w``::

    l(B) = sum_k deltas[k] * log2 det(S_k) / c_b - sum_u w[u] * |B_u|_F^2
    S_k  = I + sum_{j <= k} H_j B_j B_j^H H_j^H        (j over sigma)

Covariances are parameterized by square factors ``R_u = B_u B_u^H`` so
positive semidefiniteness never has to be enforced. The factors are
packed into one real vector (real parts then imaginary parts, user by
user) and ``-l`` is minimized with :func:`maccanon._lbfgs.minimize`.

"""

import dataclasses
import logging

import numpy as np
import scipy.linalg

from ._errors import UnboundedToneError, ValidationError
from ._lbfgs import minimize
from ._options import DEFAULT_OPTIONS
from ._ratecalc import WeightVector

logger = logging.getLogger(__name__)

_LN2 = np.log(2.0)


def pack_factors(factors):
    """Pack square complex factors into one real vector."""
    parts = []
    for b in factors:
        b = np.asarray(b, dtype=complex)
        parts.append(b.real.ravel())
        parts.append(b.imag.ravel())
    return np.concatenate(parts) if parts else np.zeros(0)


def unpack_factors(z, tx_antennas):
    """Inverse of :func:`pack_factors` for factors of the given sizes."""
    z = np.asarray(z, dtype=float)
    expected = 2 * sum(lx * lx for lx in tx_antennas)
    if z.shape != (expected,):
        raise ValidationError(
            "factor vector has shape {}, expected ({},)".format(
                z.shape, expected
            ),
            field="z",
        )
    factors = []
    offset = 0
    for lx in tx_antennas:
        size = lx * lx
        real = z[offset:offset + size].reshape(lx, lx)
        imag = z[offset + size:offset + 2 * size].reshape(lx, lx)
        factors.append(real + 1j * imag)
        offset += 2 * size
    return factors


class ToneProblem:
    """One tone's Lagrangian subproblem.

    Args:
      H: Per-user channel matrices of this tone, all with the same number
        of rows.
      theta: Rate weights (array or :class:`WeightVector`).
      w: Energy multipliers, one per user, or a scalar shared by all
        users (the sum-energy case).
      c_b (int): Baseband constant.

    """

    def __init__(self, H, theta, w, c_b=1):
        self.H = [np.asarray(h, dtype=complex) for h in H]
        self.weights = WeightVector(theta)
        num_users = len(self.H)
        if self.weights.num_users != num_users:
            raise ValidationError(
                "{} weights for {} users".format(
                    self.weights.num_users, num_users
                ),
                field="theta",
            )
        if len({h.shape[0] for h in self.H}) != 1:
            raise ValidationError(
                "channel matrices of one tone must share the receiver",
                field="H",
            )
        w = np.broadcast_to(np.asarray(w, dtype=float), (num_users,)).copy()
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("multipliers must be finite and >= 0",
                                  field="w")
        self.w = w
        self.c_b = c_b
        self.tx_antennas = tuple(h.shape[1] for h in self.H)
        self.rx = self.H[0].shape[0]
        position = np.empty(num_users, dtype=int)
        position[list(self.weights.sigma)] = np.arange(num_users)
        self.position = position

    @classmethod
    def for_tone(cls, ch, n, theta, w):
        return cls(ch.tone(n), theta, w, ch.c_b)

    @property
    def num_users(self):
        return len(self.H)

    @property
    def dimension(self):
        return 2 * sum(lx * lx for lx in self.tx_antennas)

    def pack(self, factors):
        return pack_factors(factors)

    def unpack(self, z):
        return unpack_factors(z, self.tx_antennas)

    def frozen_users(self):
        """Users whose optimal covariance is zero regardless of ``w``.

        A user with zero weight or an all-zero channel only costs energy.

        """
        return [
            u for u in range(self.num_users)
            if self.weights.theta[u] == 0 or not np.any(self.H[u])
        ]

    def unbounded_users(self, w_floor):
        frozen = set(self.frozen_users())
        return [
            u for u in range(self.num_users)
            if u not in frozen and self.w[u] <= w_floor
        ]


def _evaluate(problem, factors):
    """Value, factor gradients and covariance-space gradients ``M_u``."""
    eye = np.eye(problem.rx, dtype=complex)
    sigma, deltas = problem.weights.sigma, problem.weights.deltas
    HB = [h @ b for h, b in zip(problem.H, factors)]
    S = eye.copy()
    value = 0.0
    inverses = [None] * problem.num_users
    for k, user in enumerate(sigma):
        S = S + HB[user] @ HB[user].conj().T
        if deltas[k] > 0:
            factor = scipy.linalg.cho_factor(S, lower=True)
            logdet = 2.0 * np.sum(np.log(np.abs(np.diag(factor[0]))))
            value += deltas[k] * logdet
            inverses[k] = scipy.linalg.cho_solve(factor, eye)
    value /= problem.c_b * _LN2
    energies = np.array([np.sum(np.abs(b) ** 2) for b in factors])
    value -= float(problem.w @ energies)

    M = [None] * problem.num_users
    T = np.zeros_like(eye)
    for k in reversed(range(problem.num_users)):
        if inverses[k] is not None:
            T = T + deltas[k] * inverses[k]
        user = sigma[k]
        h = problem.H[user]
        M[user] = (h.conj().T @ T @ h) / (problem.c_b * _LN2)
        M[user] -= problem.w[user] * np.eye(h.shape[1])
    grads = [2.0 * m @ b for m, b in zip(M, factors)]
    return value, grads, M


def tone_objective(problem, z):
    """The Lagrangian ``l`` at the packed factors ``z``."""
    value, _, _ = _evaluate(problem, problem.unpack(z))
    return value


def tone_gradient(problem, z):
    """Gradient of :func:`tone_objective` in packed real coordinates."""
    _, grads, _ = _evaluate(problem, problem.unpack(z))
    return pack_factors(grads)


@dataclasses.dataclass
class ToneSolution:
    factors: list
    covariances: list
    value: float
    iterations: int
    converged: bool
    kkt: float


def _factor_of(R):
    values, vectors = np.linalg.eigh((R + R.conj().T) / 2)
    return vectors * np.sqrt(np.clip(values, 0, None))


def _escape(problem, factors, value, M, violators):
    """Push each violating user's covariance along its top eigenvector of
    ``M_u``; returns the new factors or None if no step helps."""
    for _ in range(30):
        trial = list(factors)
        for u, eta in violators.items():
            vec = np.linalg.eigh(M[u])[1][:, -1]
            R = factors[u] @ factors[u].conj().T
            trial[u] = _factor_of(R + eta * np.outer(vec, vec.conj()))
        trial_value, _, _ = _evaluate(problem, trial)
        if trial_value > value:
            return trial
        violators = {u: eta / 2 for u, eta in violators.items()}
    return None


def solve_tone(problem, warm=None, options=DEFAULT_OPTIONS):
    """Maximize one tone's Lagrangian.

    Args:
      problem (ToneProblem): The subproblem.
      warm: Factors (list of matrices) or a packed vector to start from;
        None for the cold start ``cold_scale * I``.
      options (SolverOptions): Inner-solver settings.

    Returns:
      ToneSolution: factors, covariances ``B B^H``, the value, the L-BFGS
      iteration count, whether the gradient tolerance was met, and the
      largest eigenvalue of any ``M_u`` (at most ``kkt_tol`` scale when
      the tone is globally optimal).

    Raises:
      UnboundedToneError: if a user with positive weight and a nonzero
          channel has its multiplier at or below ``w_floor``.

    """
    unbounded = problem.unbounded_users(options.w_floor)
    if unbounded:
        raise UnboundedToneError(unbounded)

    frozen = problem.frozen_users()
    if not np.any(problem.weights.deltas) or len(frozen) == problem.num_users:
        zeros = [np.zeros((lx, lx), dtype=complex)
                 for lx in problem.tx_antennas]
        return ToneSolution(zeros, [z.copy() for z in zeros], 0.0, 0, True,
                            0.0)

    if warm is None:
        factors = [options.cold_scale * np.eye(lx, dtype=complex)
                   for lx in problem.tx_antennas]
    elif isinstance(warm, np.ndarray) and warm.ndim == 1:
        factors = problem.unpack(warm)
    else:
        factors = [np.array(b, dtype=complex) for b in warm]
    for u in frozen:
        factors[u] = np.zeros_like(factors[u])

    def negated(z):
        value, grads, _ = _evaluate(problem, problem.unpack(z))
        for u in frozen:
            grads[u] = np.zeros_like(grads[u])
        return -value, -pack_factors(grads)

    threshold = options.kkt_tol * (1 + float(np.max(problem.w)))
    active = [u for u in range(problem.num_users) if u not in frozen]
    iterations = 0
    for round_ in range(options.escape_rounds + 1):
        result = minimize(
            negated,
            problem.pack(factors),
            memory=options.memory,
            c1=options.armijo_c1,
            backtrack=options.backtrack,
            initial_step=options.initial_step,
            max_iter=options.max_inner,
            tol=options.tol_inner,
        )
        iterations += result.iterations
        factors = problem.unpack(result.x)
        value, _, M = _evaluate(problem, factors)
        tops = {u: np.linalg.eigvalsh(M[u])[-1] for u in active}
        kkt = max(tops.values())
        violators = {
            u: 0.01 * (1 + np.sum(np.abs(factors[u]) ** 2)
                       / problem.tx_antennas[u])
            for u, top in tops.items() if top > threshold
        }
        if not violators or round_ == options.escape_rounds:
            break
        escaped = _escape(problem, factors, value, M, violators)
        if escaped is None:
            break
        logger.debug("escaping stationary point for users %s",
                     sorted(violators))
        factors = escaped

    covariances = [b @ b.conj().T for b in factors]
    return ToneSolution(
        factors, covariances, value, iterations, result.converged, kkt
    )
