"""Time-sharing over decoding-order vertices.

Two independent tools over the same vertex sets: an exact phase-one
simplex (for the time-sharing fractions) and an away-step Frank-Wolfe
projection (for membership with a distance certificate).

"""

import dataclasses
import logging

import numpy as np

from ._errors import NumericalBreakdown, ValidationError

logger = logging.getLogger(__name__)

# Componentwise slack with which a rate vector "meets" a target.
SUPPORT_TOL = 1e-9


class VertexSet:
    """Rate vectors, each tagged with what produced it (e.g. an order).

    Args:
      vertices: Array-like of shape ``(K, m)``, finite and nonnegative.
      tags: Optional list of ``K`` tags; defaults to ``0..K-1``.

    """

    def __init__(self, vertices=(), tags=None, dimension=None):
        points = np.array(vertices, dtype=float)
        if points.size == 0:
            points = np.zeros((0, dimension or 0))
        if points.ndim != 2:
            raise ValidationError("vertices must form a 2-D array",
                                  field="V")
        if not np.all(np.isfinite(points)) or np.any(points < 0):
            raise ValidationError("vertices must be finite and nonnegative",
                                  field="V")
        self._points = [row for row in points]
        self._dimension = points.shape[1]
        self._tags = list(range(len(points))) if tags is None else list(tags)
        if len(self._tags) != len(self._points):
            raise ValidationError("one tag per vertex is required",
                                  field="tags")

    def add(self, vertex, tag=None, tol=1e-9):
        """Add ``vertex`` unless one within ``tol`` (max-norm) is present.

        Returns True if the vertex was new.

        """
        vertex = np.array(vertex, dtype=float)
        if vertex.shape != (self._dimension,):
            raise ValidationError(
                "vertex has shape {}, expected ({},)".format(
                    vertex.shape, self._dimension
                ),
                field="V",
            )
        if np.any(vertex < 0) or not np.all(np.isfinite(vertex)):
            raise ValidationError("vertices must be finite and nonnegative",
                                  field="V")
        for existing in self._points:
            if np.max(np.abs(existing - vertex)) <= tol:
                return False
        self._points.append(vertex)
        self._tags.append(len(self._tags) if tag is None else tag)
        return True

    @property
    def points(self):
        return np.array(self._points).reshape(-1, self._dimension)

    @property
    def tags(self):
        return list(self._tags)

    @property
    def dimension(self):
        return self._dimension

    def __len__(self):
        return len(self._points)

    def __repr__(self):
        return "<VertexSet {} vertices in R^{}>".format(
            len(self), self._dimension
        )


def _as_points(V):
    if isinstance(V, VertexSet):
        points = V.points
    else:
        points = np.asarray(V, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValidationError("vertex set must not be empty", field="V")
    return points


################################################################
# Phase-one simplex
################################################################


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0:
            T[i] -= T[i, col] * T[row]


def simplex_phase_one(A, b, tol=1e-9):
    """Find ``x >= 0`` with ``A x = b``, or return None if there is none.

    Tableau phase one with one artificial variable per row and Bland's
    smallest-index rule for both entering and leaving variables, so it
    cannot cycle. The system is declared feasible when the artificial
    sum drops to ``tol * (1 + |b|_1)``.

    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    rows, cols = A.shape
    negative = b < 0
    A[negative] *= -1
    b[negative] *= -1

    T = np.zeros((rows + 1, cols + rows + 1))
    T[:rows, :cols] = A
    T[:rows, cols:cols + rows] = np.eye(rows)
    T[:rows, -1] = b
    # objective row: reduced costs of "minimize the artificial sum"
    T[rows, :cols] = -A.sum(axis=0)
    T[rows, -1] = -b.sum()
    basis = list(range(cols, cols + rows))

    eps = 1e-12
    max_pivots = 50 * (rows + cols)
    for _ in range(max_pivots):
        entering = np.flatnonzero(T[rows, :-1] < -eps)
        if entering.size == 0:
            break
        col = int(entering[0])
        column = T[:rows, col]
        candidates = np.flatnonzero(column > eps)
        if candidates.size == 0:
            # cannot happen for a bounded phase-one objective
            raise NumericalBreakdown("phase-one simplex is unbounded")
        ratios = T[candidates, -1] / column[candidates]
        best = ratios.min()
        ties = candidates[ratios <= best + eps * (1 + abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, row, col)
        basis[row] = col
    else:
        raise NumericalBreakdown(
            "phase-one simplex did not terminate in {} pivots".format(
                max_pivots
            )
        )

    infeasibility = -T[rows, -1]
    if infeasibility > tol * (1 + np.abs(b).sum()):
        return None
    x = np.zeros(cols)
    for i, var in enumerate(basis):
        if var < cols:
            x[var] = max(T[i, -1], 0.0)
    return x


def timeshare_lp(V, b_min):
    """Time-sharing fractions over the vertices that meet ``b_min``.

    Finds ``alpha >= 0`` with ``sum(alpha) == 1`` and
    ``sum_k alpha[k] * V[k] >= b_min - SUPPORT_TOL`` componentwise. If a
    single vertex already meets ``b_min`` the first such vertex gets all
    the weight.

    Returns:
      The fractions as an array, or None when no mixture meets ``b_min``.

    """
    points = _as_points(V)
    b_min = np.asarray(b_min, dtype=float)
    K, m = points.shape
    if b_min.shape != (m,):
        raise ValidationError(
            "target has shape {}, vertices live in R^{}".format(
                b_min.shape, m
            ),
            field="b_min",
        )
    meets = np.flatnonzero(np.all(points >= b_min - SUPPORT_TOL, axis=1))
    if meets.size:
        alpha = np.zeros(K)
        alpha[meets[0]] = 1.0
        return alpha

    # sum_k alpha_k V[k] - s = b_min,  sum_k alpha_k = 1,  alpha, s >= 0
    A = np.zeros((m + 1, K + m))
    A[:m, :K] = points.T
    A[:m, K:] = -np.eye(m)
    A[m, :K] = 1.0
    x = simplex_phase_one(A, np.append(b_min, 1.0))
    if x is None:
        return None
    alpha = np.clip(x[:K], 0, None)
    alpha /= alpha.sum()
    alpha[alpha < 1e-12] = 0.0
    alpha /= alpha.sum()
    achieved = alpha @ points
    if np.any(achieved < b_min - SUPPORT_TOL):
        logger.debug("time-sharing solution misses the target by %.3g",
                     np.max(b_min - achieved))
        return None
    return alpha


################################################################
# Frank-Wolfe membership
################################################################


@dataclasses.dataclass
class Membership:
    inside: bool
    weights: np.ndarray
    distance: float
    iterations: int
    gap: float


def _objective(residual, dominate):
    if dominate:
        residual = np.clip(residual, 0, None)
    return float(residual @ residual)


def _line_min(residual, d, gamma_max, dominate):
    """Exact minimizer over ``[0, gamma_max]`` of the objective at
    ``residual - gamma * d``."""
    if not dominate:
        dd = d @ d
        if dd == 0:
            return 0.0
        return float(np.clip((residual @ d) / dd, 0.0, gamma_max))
    # convex piecewise quadratic: minimize on each piece
    nonzero = d != 0
    breaks = residual[nonzero] / d[nonzero]
    knots = np.unique(np.concatenate((
        [0.0, gamma_max], breaks[(breaks > 0) & (breaks < gamma_max)]
    )))
    best_gamma, best_value = 0.0, _objective(residual, True)
    for lo, hi in zip(knots[:-1], knots[1:]):
        mid = (lo + hi) / 2
        active = residual - mid * d > 0
        dd = d[active] @ d[active]
        candidates = [lo, hi]
        if dd > 0:
            candidates.append(
                np.clip((residual[active] @ d[active]) / dd, lo, hi)
            )
        for gamma in candidates:
            value = _objective(residual - gamma * d, True)
            if value < best_value:
                best_gamma, best_value = float(gamma), value
    return best_gamma


def fw_membership(V, target, tol=1e-6, dominate=False, max_iter=2000):
    """Is ``target`` in the convex hull of ``V``?

    Minimizes ``|x - target|^2`` over the hull with away-step Frank-Wolfe
    and exact line search. With ``dominate=True`` the objective is
    ``|(target - x)_+|^2`` instead, which is zero exactly when some hull
    point is componentwise at least ``target``.

    The loop stops when the Frank-Wolfe gap is at most ``(tol / 4)**2``
    or when ``f(x) - gap`` already proves the distance exceeds the
    tolerance.

    Returns:
      Membership: ``inside`` is ``distance <= tol * (1 + |target|)``;
      ``weights`` are the convex weights of the final iterate.

    """
    points = _as_points(V)
    target = np.asarray(target, dtype=float)
    if target.shape != (points.shape[1],):
        raise ValidationError(
            "target has shape {}, vertices live in R^{}".format(
                target.shape, points.shape[1]
            ),
            field="target",
        )
    threshold = tol * (1 + np.linalg.norm(target))

    start = int(np.argmin([
        _objective(target - p, dominate) for p in points
    ]))
    weights = np.zeros(len(points))
    weights[start] = 1.0
    x = points[start].copy()
    gap = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        residual = target - x
        if dominate:
            grad = -2 * np.clip(residual, 0, None)
        else:
            grad = -2 * residual
        scores = points @ grad
        s = int(np.argmin(scores))
        gap = float(grad @ x - scores[s])
        value = _objective(residual, dominate)
        if gap <= (tol / 4) ** 2 or value - gap > threshold ** 2:
            break
        active = np.flatnonzero(weights > 0)
        a = int(active[np.argmax(scores[active])])
        away_gap = float(scores[a] - grad @ x)
        if gap >= away_gap:
            d = points[s] - x
            gamma = _line_min(residual, d, 1.0, dominate)
            weights *= 1 - gamma
            weights[s] += gamma
        else:
            d = x - points[a]
            gamma_max = weights[a] / (1 - weights[a])
            gamma = _line_min(residual, d, gamma_max, dominate)
            weights *= 1 + gamma
            weights[a] -= gamma
            if gamma == gamma_max:
                weights[a] = 0.0
        weights = np.clip(weights, 0, None)
        weights /= weights.sum()
        x = weights @ points

    distance = np.sqrt(_objective(target - x, dominate))
    return Membership(
        bool(distance <= threshold), weights, float(distance), iterations,
        max(gap, 0.0),
    )
