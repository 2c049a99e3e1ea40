"""Central-cut ellipsoid method over the nonnegative orthant.

The ellipsoid is ``{x : (x - c)^T A^{-1} (x - c) <= 1}``. A cut with
vector ``g`` keeps the half ``g^T (x - c) <= 0``.

"""

import dataclasses

import numpy as np

from ._errors import NumericalBreakdown, ValidationError


@dataclasses.dataclass(frozen=True)
class EllipsoidState:
    center: np.ndarray
    shape: np.ndarray
    iterations: int = 0

    @classmethod
    def ball(cls, center, radius):
        center = np.array(center, dtype=float)
        return cls(center, radius ** 2 * np.eye(center.size))

    @property
    def dimension(self):
        return self.center.size

    def contains(self, point, slack=1e-12):
        offset = np.asarray(point, dtype=float) - self.center
        return offset @ np.linalg.solve(self.shape, offset) <= 1 + slack


def _repair(A):
    values, vectors = np.linalg.eigh((A + A.T) / 2)
    floor = 1e-12 * max(np.max(np.abs(values)), np.finfo(float).tiny)
    return (vectors * np.maximum(values, floor)) @ vectors.T


def ellipsoid_step(state, g):
    """Cut ``state`` with ``g`` and return the minimum-volume ellipsoid
    containing the kept half.

    In one dimension this is interval bisection.

    Raises:
      ValidationError: if ``g`` is zero.
      NumericalBreakdown: if ``g^T A g`` stays nonpositive after one
          repair of ``A``.

    """
    g = np.asarray(g, dtype=float)
    if not np.any(g):
        raise ValidationError("cut vector must be nonzero", field="g")
    A = state.shape
    gAg = g @ A @ g
    if not gAg > 0:
        A = _repair(A)
        gAg = g @ A @ g
        if not gAg > 0:
            raise NumericalBreakdown(
                "ellipsoid shape matrix is not positive definite"
            )
    U = state.dimension
    if U == 1:
        radius = np.sqrt(A[0, 0])
        center = state.center - np.sign(g) * radius / 2
        shape = A / 4
    else:
        Ag = A @ (g / np.sqrt(gAg))
        center = state.center - Ag / (U + 1)
        shape = (U * U / (U * U - 1.0)) * (
            A - (2.0 / (U + 1)) * np.outer(Ag, Ag)
        )
        shape = (shape + shape.T) / 2
    return EllipsoidState(center, shape, state.iterations + 1)


def constraint_cut(state, u, max_cuts=50):
    """Cut along ``-e_u`` until the center has ``x_u >= 0``.

    Raises:
      NumericalBreakdown: after ``max_cuts`` cuts without reaching the
          orthant.

    """
    cuts = 0
    while state.center[u] < 0:
        if cuts == max_cuts:
            raise NumericalBreakdown(
                "ellipsoid collapsed outside feasible orthant "
                "(coordinate {})".format(u)
            )
        g = np.zeros(state.dimension)
        g[u] = -1.0
        state = ellipsoid_step(state, g)
        cuts += 1
    return state


def project_orthant(state, max_cuts=50):
    """Apply :func:`constraint_cut` to every negative coordinate."""
    for _ in range(max_cuts * state.dimension):
        if not np.any(state.center < 0):
            return state
        u = int(np.argmin(state.center))
        state = constraint_cut(state, u, max_cuts)
    if np.any(state.center < 0):
        raise NumericalBreakdown(
            "ellipsoid collapsed outside feasible orthant"
        )
    return state


def stop_metric(state, g):
    """``sqrt(g^T A g)``, the width of the ellipsoid along ``g``."""
    g = np.asarray(g, dtype=float)
    return float(np.sqrt(max(g @ state.shape @ g, 0.0)))
