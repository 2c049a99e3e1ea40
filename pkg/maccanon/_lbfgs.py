"""Limited-memory BFGS with Armijo backtracking."""

import collections
import dataclasses
import logging

import numpy as np

from ._errors import NumericalBreakdown

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class MinimizeResult:
    x: np.ndarray
    f: float
    g: np.ndarray
    iterations: int
    converged: bool
    history: list


def armijo(fun, x, f, slope, d, *, step=1.0, c1=1e-4, backtrack=0.5,
           max_backtracks=50):
    """Backtrack from ``step`` until the sufficient-decrease condition holds.

    Args:
      fun: Returns ``(value, gradient)`` at a point.
      x, f: The current point and its value.
      slope: Directional derivative ``g @ d`` (negative).
      d: The search direction.

    Returns:
      ``(step, x_new, f_new, g_new)``, or None if no step within
      ``max_backtracks`` halvings gave sufficient decrease. Non-finite
      trial values count as failures.

    """
    for _ in range(max_backtracks):
        x_new = x + step * d
        f_new, g_new = fun(x_new)
        if np.isfinite(f_new) and f_new <= f + c1 * step * slope:
            return step, x_new, f_new, g_new
        step *= backtrack
    return None


def _two_loop(g, pairs):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        alpha = rho * (s @ q)
        q -= alpha * y
        alphas.append(alpha)
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), alpha in zip(pairs, reversed(alphas)):
        beta = rho * (y @ q)
        q += (alpha - beta) * s
    return q


def minimize(fun, x0, *, memory=10, c1=1e-4, backtrack=0.5, initial_step=1.0,
             max_iter=200, tol=1e-7):
    """Minimize a smooth function with L-BFGS.

    Args:
      fun: Returns ``(value, gradient)`` for a real vector.
      x0: Starting point.
      memory (int): Number of curvature pairs kept.
      tol (float): Stop once ``|g| <= tol * (1 + |f|)``.

    The objective never increases between accepted iterates. A direction
    that is not a descent direction resets the memory to steepest descent.

    Raises:
      NumericalBreakdown: if the objective is not finite at ``x0``.

    """
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise NumericalBreakdown("objective is not finite at the start point")
    pairs = collections.deque(maxlen=memory)
    history = [f]
    converged = False
    iterations = 0
    while True:
        if np.linalg.norm(g) <= tol * (1 + abs(f)):
            converged = True
            break
        if iterations >= max_iter:
            break
        d = -_two_loop(g, pairs)
        slope = g @ d
        if not slope < 0:
            pairs.clear()
            d = -g
            slope = -(g @ g)
        step = initial_step
        if not pairs:
            step = min(initial_step, 1.0 / np.linalg.norm(g))
        accepted = armijo(fun, x, f, slope, d, step=step, c1=c1,
                          backtrack=backtrack)
        if accepted is None:
            logger.debug("line search stalled at |g|=%.3g",
                         np.linalg.norm(g))
            break
        _, x_new, f_new, g_new = accepted
        s = x_new - x
        y = g_new - g
        sy = s @ y
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y, 1.0 / sy))
        x, f, g = x_new, f_new, g_new
        history.append(f)
        iterations += 1
    return MinimizeResult(x, f, g, iterations, converged, history)
