"""How often does minimum-energy rate support need time sharing?"""

import dataclasses
import logging

import numpy as np

from ._errors import NonConvergenceError
from ._model import ChannelSpec, generate_channel
from ._options import DEFAULT_OPTIONS
from ._solvers import FLAG_INFEASIBLE, FLAG_TIMESHARE, max_rmac, min_pmac

logger = logging.getLogger(__name__)

STUDY_COLUMNS = (
    "tones",
    "rho",
    "trials",
    "timeshare_prob",
    "mean_alpha_max",
    "infeasible",
    "nonconverged",
)


@dataclasses.dataclass
class StudyCell:
    tones: int
    rho: float
    trials: int = 0
    timeshared: int = 0
    alpha_max: list = dataclasses.field(default_factory=list)
    infeasible: int = 0
    nonconverged: int = 0
    # worst violation of the time-sharing constraints over flag-2 trials
    alpha_residual: float = 0.0

    @property
    def timeshare_prob(self):
        return self.timeshared / self.trials if self.trials else 0.0

    @property
    def mean_alpha_max(self):
        return float(np.mean(self.alpha_max)) if self.alpha_max else None

    def row(self):
        return (
            self.tones,
            self.rho,
            self.trials,
            self.timeshare_prob,
            self.mean_alpha_max,
            self.infeasible,
            self.nonconverged,
        )


def trial_seed(seed, tones, trial):
    """Channel seed of one ``(tones, trial)`` pair, shared by every rho."""
    sequence = np.random.SeedSequence([seed, tones, trial])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _alpha_residual(report, b_min):
    alpha = np.asarray(report.alpha)
    return float(max(
        abs(alpha.sum() - 1.0),
        -alpha.min(),
        np.max(b_min - report.rates),
        0.0,
    ))


def single_user_rates(ch, E, options=DEFAULT_OPTIONS):
    """Each user's largest rate when it transmits alone with ``E[u]``."""
    rates = np.zeros(ch.num_users)
    for u in range(ch.num_users):
        theta = np.zeros(ch.num_users)
        theta[u] = 1.0
        rates[u] = max_rmac(ch, E, theta, options).rates[u]
    return rates


def timeshare_study(tones, rhos, trials, *, snr_db=10.0, seed=0,
                    users=3, rx_antennas=2, tx_antennas=1,
                    options=DEFAULT_OPTIONS):
    """Sweep tone counts and loading factors.

    For every tone count and trial a channel is drawn (``min(3, N)``
    delay taps) and each user's single-user boundary rate at
    ``E_u = N * 10**(snr_db / 10)`` is computed (:func:`single_user_rates`).
    Each loading factor ``rho`` then asks :func:`min_pmac` (unit energy
    weights) to support ``rho`` times those rates.

    Returns:
      list of StudyCell, tone-major in the order given.

    """
    cells = {
        (n, rho): StudyCell(n, float(rho)) for n in tones for rho in rhos
    }
    for n in tones:
        energies = np.full(users, n * 10 ** (snr_db / 10))
        for trial in range(trials):
            spec = ChannelSpec(
                num_users=users,
                rx_antennas=rx_antennas,
                tx_antennas=tx_antennas,
                num_tones=n,
                taps=min(3, n),
                seed=trial_seed(seed, n, trial),
            )
            ch = generate_channel(spec)
            solo = single_user_rates(ch, energies, options)
            for rho in rhos:
                cell = cells[(n, rho)]
                cell.trials += 1
                try:
                    report = min_pmac(ch, rho * solo, np.ones(users), options)
                except NonConvergenceError:
                    cell.nonconverged += 1
                    continue
                if report.flag == FLAG_INFEASIBLE:
                    cell.infeasible += 1
                elif report.flag == FLAG_TIMESHARE:
                    cell.timeshared += 1
                    cell.alpha_max.append(float(np.max(report.alpha)))
                    cell.alpha_residual = max(
                        cell.alpha_residual,
                        _alpha_residual(report, rho * solo),
                    )
            logger.info("study: tones %d trial %d done", n, trial)
    return [cells[(n, rho)] for n in tones for rho in rhos]
