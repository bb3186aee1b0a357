"""Weak Wolfe line search by bracketing and bisection."""

from __future__ import annotations

import math
from typing import Callable, Tuple

from .errors import LineSearchError


def line_search_weak_wolfe(
    f: Callable[[float], Tuple[float, float]],
    c1: float = 1e-4,
    c2: float = 0.9,
    max_steps: int = 60,
    f0: Tuple[float, float] | None = None,
):
    """Find a step satisfying the Armijo and weak Wolfe conditions.

    ``f(t)`` returns the merit value and its derivative along the search line.
    The trial step starts at 1, so a unit step is returned whenever it is
    admissible. A failed Armijo test shrinks the bracket from above, a failed
    curvature test raises its lower end (doubling while no upper end is known).

    Returns
    -------
    tau : float
        Accepted step.
    evals : int
        Number of evaluations of ``f`` at trial steps.
    """
    if not 0.0 < c1 < c2 < 1.0:
        raise ValueError(f"need 0 < c1 < c2 < 1, got c1={c1}, c2={c2}")
    phi0, dphi0 = f(0.0) if f0 is None else f0
    if not dphi0 < 0.0:
        raise ValueError(f"not a descent direction: f'(0) = {dphi0}")

    lo, hi = 0.0, math.inf
    t = 1.0
    for evals in range(1, max_steps + 1):
        phi, dphi = f(t)
        if not (phi <= phi0 + c1 * t * dphi0):  # also rejects nan
            hi = t
        elif dphi < c2 * dphi0:
            lo = t
        else:
            return t, evals
        t = 2.0 * lo if math.isinf(hi) else 0.5 * (lo + hi)
        if (not math.isinf(hi) and hi - lo <= 1e-16 * max(1.0, hi)) or t == 0.0:
            raise LineSearchError(f"bracket collapsed to [{lo}, {hi}] after {evals} steps")
    raise LineSearchError(f"no admissible step within {max_steps} evaluations")
