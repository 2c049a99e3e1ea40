"""Domain types, synthetic channels, whitening and the dual BC channel."""

import dataclasses
import logging
from typing import Tuple, Union

import numpy as np

from ._errors import ValidationError, raise_collected

logger = logging.getLogger(__name__)

MODELS = ("iid_rayleigh", "kronecker_exponential")


def _frozen(array, dtype=complex):
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


class ChannelSet:
    """Per-tone, per-user channel matrices of a MIMO multiple-access channel.

    Args:
      H: Nested sequence where ``H[n][u]`` is the noise-whitened matrix of
        user ``u`` on tone ``n``, of shape ``(L_y, L_x[u])``.
      c_b (int): Baseband constant, 1 for complex and 2 for real signals.
      dual (bool): True for a channel set built by
        :func:`dual_bc_channel`. Its users have individual receive
        dimensions and share the column count instead.
      rx_antennas, tx_antennas: Optional declared dimensions (as read
        from a file); every matrix shape is checked against them.

    Raises:
      ValidationError: (or an :class:`ErrorGroup` of them) when a matrix
        is not finite, shapes disagree, or ``c_b`` is not 1 or 2.

    """

    def __init__(self, H, c_b=1, dual=False, rx_antennas=None,
                 tx_antennas=None):
        self._c_b = c_b
        self._dual = bool(dual)
        self._H = tuple(
            tuple(_frozen(matrix) for matrix in tone) for tone in H
        )
        self._validate(rx_antennas, tx_antennas)

    def _validate(self, rx_antennas, tx_antennas):
        if self._c_b not in (1, 2) or isinstance(self._c_b, bool):
            raise ValidationError(
                "c_b must be 1 (complex) or 2 (real), got {!r}".format(
                    self._c_b
                ),
                field="c_b",
            )
        if not self._H or not self._H[0]:
            raise ValidationError(
                "a channel set needs at least one tone and one user",
                field="H",
            )
        num_users = len(self._H[0])
        if tx_antennas is None:
            tx_antennas = [np.shape(m)[1] if np.ndim(m) == 2 else None
                           for m in self._H[0]]
        if rx_antennas is None:
            rx_antennas = [np.shape(m)[0] if np.ndim(m) == 2 else None
                           for m in self._H[0]]
        elif np.ndim(rx_antennas) == 0:
            rx_antennas = [rx_antennas] * num_users
        if len(tx_antennas) != num_users or len(rx_antennas) != num_users:
            raise ValidationError(
                "declared dimensions do not match {} users".format(num_users),
                field="L_x",
            )
        failures = []
        for n, tone in enumerate(self._H):
            if len(tone) != num_users:
                failures.append((
                    "H[n={}]".format(n),
                    ValidationError(
                        "tone {} has {} users, expected {}".format(
                            n, len(tone), num_users
                        ),
                        field="H[n={}]".format(n),
                    ),
                ))
                continue
            for u, matrix in enumerate(tone):
                where = "H[n={}][u={}]".format(n, u)
                expected = (rx_antennas[u], tx_antennas[u])
                if matrix.shape != expected:
                    failures.append((where, ValidationError(
                        "{}: shape {} does not match declared {}".format(
                            where, matrix.shape, expected
                        ),
                        field=where,
                    )))
                elif not np.all(np.isfinite(matrix)):
                    failures.append((where, ValidationError(
                        "{}: matrix has NaN or Inf entries".format(where),
                        field=where,
                    )))
                elif self._c_b == 2 and np.any(matrix.imag != 0):
                    failures.append((where, ValidationError(
                        "{}: real baseband channel has imaginary "
                        "entries".format(where),
                        field=where,
                    )))
        raise_collected("invalid channel set", failures)
        if not self._dual and len(set(rx_antennas)) != 1:
            raise ValidationError(
                "all users of a MAC share the receiver, got receive "
                "dimensions {}".format(rx_antennas),
                field="L_y",
            )

    @property
    def H(self):
        return self._H

    @property
    def c_b(self):
        return self._c_b

    @property
    def dual(self):
        return self._dual

    @property
    def num_tones(self):
        return len(self._H)

    @property
    def num_users(self):
        return len(self._H[0])

    @property
    def tx_antennas(self):
        return tuple(matrix.shape[1] for matrix in self._H[0])

    @property
    def rx_dims(self):
        """Receive dimension of each user (all equal unless ``dual``)."""
        return tuple(matrix.shape[0] for matrix in self._H[0])

    @property
    def rx_antennas(self):
        if self._dual:
            raise ValidationError(
                "a dual BC channel set has per-user receive dimensions; "
                "use rx_dims",
                field="L_y",
            )
        return self._H[0][0].shape[0]

    @property
    def total_tx(self):
        """The aggregate transmit dimension L_T."""
        return sum(self.tx_antennas)

    def tone(self, n):
        return self._H[n]

    def user_is_silent(self, u):
        """True when user ``u`` has an all-zero channel on every tone."""
        return all(not np.any(tone[u]) for tone in self._H)

    def require_mac(self):
        if self._dual:
            raise ValidationError(
                "MAC solvers need an ordinary channel set, not a dual BC one",
                field="dual",
            )

    def __eq__(self, other):
        if not isinstance(other, ChannelSet):
            return NotImplemented
        if (self._c_b, self._dual) != (other._c_b, other._dual):
            return False
        if self.num_tones != other.num_tones:
            return False
        if self.num_users != other.num_users:
            return False
        return all(
            a.shape == b.shape and np.array_equal(a, b)
            for tone_a, tone_b in zip(self._H, other._H)
            for a, b in zip(tone_a, tone_b)
        )

    __hash__ = None

    def __repr__(self):
        return "<ChannelSet U={} N={} L_y={} L_x={} c_b={}{}>".format(
            self.num_users,
            self.num_tones,
            self.rx_dims if self._dual else self.rx_dims[0],
            list(self.tx_antennas),
            self._c_b,
            " dual" if self._dual else "",
        )


@dataclasses.dataclass(frozen=True)
class ChannelSpec:
    """Recipe for :func:`generate_channel`.

    ``tx_antennas`` may be a single integer (every user) or one integer
    per user. ``rho_tx``/``rho_rx`` only matter for the
    ``kronecker_exponential`` model.

    """

    num_users: int = 4
    rx_antennas: int = 4
    tx_antennas: Union[int, Tuple[int, ...]] = 2
    num_tones: int = 16
    c_b: int = 1
    model: str = "iid_rayleigh"
    rho_tx: float = 0.0
    rho_rx: float = 0.0
    taps: int = 1
    seed: int = 0

    def __post_init__(self):
        if np.ndim(self.tx_antennas) == 0:
            tx = (self.tx_antennas,) * max(int(self.num_users), 0)
        else:
            tx = tuple(self.tx_antennas)
        object.__setattr__(self, "tx_antennas", tx)

        failures = []

        def check(ok, field, message):
            if not ok:
                failures.append((field, ValidationError(message, field)))

        def positive_int(value):
            return isinstance(value, (int, np.integer)) and value >= 1

        check(positive_int(self.num_users), "num_users",
              "num_users must be a positive integer")
        check(positive_int(self.rx_antennas), "rx_antennas",
              "rx_antennas must be a positive integer")
        check(positive_int(self.num_tones), "num_tones",
              "num_tones must be a positive integer")
        check(len(tx) == self.num_users and all(map(positive_int, tx)),
              "tx_antennas",
              "tx_antennas must be one positive integer per user")
        check(self.c_b in (1, 2), "c_b", "c_b must be 1 or 2")
        check(self.model in MODELS, "model",
              "model must be one of {}".format(", ".join(MODELS)))
        for name in ("rho_tx", "rho_rx"):
            value = getattr(self, name)
            check(np.isfinite(value) and 0 <= value < 1, name,
                  "{} must lie in [0, 1), got {!r}".format(name, value))
        check(positive_int(self.taps), "taps",
              "taps must be a positive integer")
        if positive_int(self.taps) and positive_int(self.num_tones):
            check(self.taps <= self.num_tones, "taps",
                  "taps ({}) cannot exceed num_tones ({})".format(
                      self.taps, self.num_tones))
        check(self.c_b != 2 or self.taps == 1, "taps",
              "real baseband (c_b=2) channels are flat: taps must be 1")
        check(isinstance(self.seed, (int, np.integer))
              and 0 <= self.seed < 2 ** 64, "seed",
              "seed must be an integer in [0, 2**64)")
        raise_collected("invalid channel spec", failures)


def exponential_correlation(size, rho):
    """The matrix with entries ``rho ** |i - j|``."""
    index = np.arange(size)
    return rho ** np.abs(index[:, None] - index[None, :])


def _psd_sqrt(matrix):
    values, vectors = np.linalg.eigh(matrix)
    return (vectors * np.sqrt(np.clip(values, 0, None))) @ vectors.conj().T


def generate_channel(spec):
    """Draw a random channel set from ``spec``.

    Every user gets ``spec.taps`` independent Gaussian delay taps of
    variance ``1/taps`` per entry, optionally shaped by separable
    exponential correlation, and the taps are taken to the tones with a
    DFT so that each tone's entries are unit-variance. The result is a
    pure function of ``spec`` (seed included).

    """
    rng = np.random.default_rng(spec.seed)
    n_tones, n_taps, n_rx = spec.num_tones, spec.taps, spec.rx_antennas
    kronecker = spec.model == "kronecker_exponential"
    if kronecker:
        rx_half = _psd_sqrt(exponential_correlation(n_rx, spec.rho_rx))

    per_user = []
    for n_tx in spec.tx_antennas:
        shape = (n_taps, n_rx, n_tx)
        if spec.c_b == 1:
            taps = (
                rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            ) / np.sqrt(2)
        else:
            taps = rng.standard_normal(shape).astype(complex)
        taps /= np.sqrt(n_taps)
        if kronecker:
            tx_half = _psd_sqrt(exponential_correlation(n_tx, spec.rho_tx))
            taps = rx_half @ taps @ tx_half
        if n_taps == 1:
            tones = np.broadcast_to(taps[0], (n_tones, n_rx, n_tx))
        else:
            padded = np.zeros((n_tones, n_rx, n_tx), dtype=complex)
            padded[:n_taps] = taps
            tones = np.fft.fft(padded, axis=0)
        per_user.append(tones)

    H = [[per_user[u][n] for u in range(spec.num_users)]
         for n in range(n_tones)]
    logger.debug("generated channel %r", spec)
    return ChannelSet(H, c_b=spec.c_b)


def whiten(H_raw, noise_cov):
    """Return ``noise_cov^{-1/2} @ H_raw``.

    The inverse square root comes from the Hermitian eigendecomposition
    of ``noise_cov``.

    Raises:
      ValidationError: if ``noise_cov`` is not square, not Hermitian or
          not positive definite (smallest eigenvalue at most ``1e-12``
          times the largest).

    """
    H_raw = np.asarray(H_raw, dtype=complex)
    noise = np.asarray(noise_cov, dtype=complex)
    if noise.ndim != 2 or noise.shape[0] != noise.shape[1]:
        raise ValidationError("noise covariance must be square", "noise_cov")
    if noise.shape[0] != H_raw.shape[0]:
        raise ValidationError(
            "noise covariance is {0}x{0} but the channel has {1} rows".format(
                noise.shape[0], H_raw.shape[0]
            ),
            "noise_cov",
        )
    scale = 1 + np.max(np.abs(noise))
    if np.max(np.abs(noise - noise.conj().T)) > 1e-10 * scale:
        raise ValidationError("noise covariance is not Hermitian",
                              "noise_cov")
    values, vectors = np.linalg.eigh((noise + noise.conj().T) / 2)
    if values[-1] <= 0 or values[0] <= 1e-12 * values[-1]:
        raise ValidationError(
            "noise covariance is not positive definite (eigenvalues "
            "{:.3g} .. {:.3g})".format(values[0], values[-1]),
            "noise_cov",
        )
    inv_sqrt = (vectors / np.sqrt(values)) @ vectors.conj().T
    return inv_sqrt @ H_raw


def dual_bc_channel(mac):
    """Build the dual channel: conjugate transposes in reversed user order.

    Output user ``u`` gets ``H[n][U-1-u]^H`` on every tone. Applying the
    construction twice gives back the input exactly.

    """
    U = mac.num_users
    H = [[tone[U - 1 - u].conj().T for u in range(U)] for tone in mac.H]
    return ChannelSet(H, c_b=mac.c_b, dual=not mac.dual)


def _hermitian_psd_problem(R):
    """Return a description of why ``R`` is not Hermitian PSD, or None."""
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        return "covariance must be square, got shape {}".format(R.shape)
    if not np.all(np.isfinite(R)):
        return "covariance has NaN or Inf entries"
    biggest = np.max(np.abs(R)) if R.size else 0.0
    if np.max(np.abs(R - R.conj().T), initial=0.0) > 1e-10 * (1 + biggest):
        return "covariance is not Hermitian"
    trace = np.trace(R).real
    lowest = np.linalg.eigvalsh((R + R.conj().T) / 2)[0]
    if lowest < -1e-9 * max(trace, 0.0) / R.shape[0] and lowest < -1e-300:
        return "covariance is not PSD (min eigenvalue {:.3g})".format(lowest)
    return None


class CovariancePlan:
    """Per-tone, per-user transmit covariances ``R[n][u]``.

    Args:
      R: Nested sequence of Hermitian PSD matrices, ``R[n][u]`` of shape
        ``(L_x[u], L_x[u])``.
      factors: Optional matching factors with ``R = B @ B^H``.

    Raises:
      ValidationError: (or an ErrorGroup of them) for any matrix that is
          not Hermitian PSD within tolerance.

    """

    def __init__(self, R, factors=None):
        self._R = tuple(tuple(_frozen(m) for m in tone) for tone in R)
        self._factors = None
        if factors is not None:
            self._factors = tuple(
                tuple(_frozen(b) for b in tone) for tone in factors
            )
        failures = []
        for n, tone in enumerate(self._R):
            for u, matrix in enumerate(tone):
                problem = _hermitian_psd_problem(matrix)
                if problem is not None:
                    where = "R[n={}][u={}]".format(n, u)
                    failures.append((where, ValidationError(
                        "{}: {}".format(where, problem), field=where
                    )))
        raise_collected("invalid covariance plan", failures)

    @classmethod
    def zeros(cls, ch):
        return cls([
            [np.zeros((lx, lx)) for lx in ch.tx_antennas]
            for _ in range(ch.num_tones)
        ])

    @classmethod
    def from_factors(cls, factors):
        R = [[b @ b.conj().T for b in tone] for tone in factors]
        return cls(R, factors=factors)

    @property
    def R(self):
        return self._R

    @property
    def factors(self):
        return self._factors

    @property
    def num_tones(self):
        return len(self._R)

    @property
    def num_users(self):
        return len(self._R[0]) if self._R else 0

    def tone(self, n):
        return self._R[n]

    def energies(self):
        """Per-user energy ``E_u = sum_n trace(R[n][u])``."""
        out = np.zeros(self.num_users)
        for tone in self._R:
            for u, matrix in enumerate(tone):
                out[u] += np.trace(matrix).real
        return out

    def total_energy(self):
        return float(np.sum(self.energies()))

    def scaled(self, scales):
        """Return a plan with user ``u``'s covariances multiplied by
        ``scales[u]`` (a scalar applies to everyone)."""
        scales = np.broadcast_to(np.asarray(scales, dtype=float),
                                 (self.num_users,))
        R = [[m * scales[u] for u, m in enumerate(tone)]
             for tone in self._R]
        factors = None
        if self._factors is not None:
            roots = np.sqrt(scales)
            factors = [[b * roots[u] for u, b in enumerate(tone)]
                       for tone in self._factors]
        return CovariancePlan(R, factors=factors)

    def check_against(self, ch):
        if (self.num_tones, self.num_users) != (ch.num_tones, ch.num_users):
            raise ValidationError(
                "plan has {}x{} tones x users, channel has {}x{}".format(
                    self.num_tones, self.num_users, ch.num_tones,
                    ch.num_users
                ),
                field="R",
            )
        for u, lx in enumerate(ch.tx_antennas):
            if self._R[0][u].shape != (lx, lx):
                raise ValidationError(
                    "R[n=0][u={}] has shape {}, channel expects {}".format(
                        u, self._R[0][u].shape, (lx, lx)
                    ),
                    field="R[n=0][u={}]".format(u),
                )

    def __eq__(self, other):
        if not isinstance(other, CovariancePlan):
            return NotImplemented
        if (self.num_tones, self.num_users) != (
            other.num_tones, other.num_users
        ):
            return False
        return all(
            np.array_equal(a, b)
            for tone_a, tone_b in zip(self._R, other._R)
            for a, b in zip(tone_a, tone_b)
        )

    __hash__ = None


class RateAllocation:
    """Per-tone, per-user rates under one decoding order.

    Args:
      b: Array-like of shape ``(N, U)``; ``b[n][u]`` in bits per
        (real or complex) dimension, all nonnegative.
      order: The decoding order, ``order[0]`` decoded first.
      plan_index (int): Which covariance plan of a report produced these
        rates.

    """

    def __init__(self, b, order, plan_index=0):
        b = np.array(b, dtype=float)
        if b.ndim != 2:
            raise ValidationError("rates must be a tones x users array",
                                  field="b")
        if not np.all(np.isfinite(b)) or np.any(b < 0):
            raise ValidationError("rates must be finite and nonnegative",
                                  field="b")
        order = tuple(int(u) for u in order)
        if sorted(order) != list(range(b.shape[1])):
            raise ValidationError(
                "order {} is not a permutation of {} users".format(
                    order, b.shape[1]
                ),
                field="order",
            )
        b.setflags(write=False)
        self._b = b
        self._order = order
        self._plan_index = int(plan_index)

    @property
    def b(self):
        return self._b

    @property
    def order(self):
        return self._order

    @property
    def plan_index(self):
        return self._plan_index

    @property
    def totals(self):
        return self._b.sum(axis=0)

    def __eq__(self, other):
        if not isinstance(other, RateAllocation):
            return NotImplemented
        return (
            self._order == other._order
            and self._plan_index == other._plan_index
            and np.array_equal(self._b, other._b)
        )

    __hash__ = None

    def __repr__(self):
        return "<RateAllocation order={} totals={}>".format(
            self._order, np.round(self.totals, 6).tolist()
        )
