"""Iterative solvers for the conformal barycenter.

All three methods work "shifted": at iterate ``w_k`` the measure is pushed
forward by ``shift(w_k, .)`` so that the current point becomes the origin,
where field, derivative and exponential map have simple closed forms. The
step ``u_k`` computed there is mapped back with ``shift(-w_k, exp_origin(.))``.

Every method stops once the Newton-Kantorovich quantity ``q_k < 1`` and the
a posteriori bound ``2 |F_k|_g / lambda_k`` drops below ``epsilon``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import ball
from .ball import BOUNDARY_GUARD
from .errors import GeometryError, LineSearchError
from .linalg import smallest_eigenvalue
from .linesearch import line_search_weak_wolfe
from .measure import DiscreteMeasure, classify_stability, pushforward

SINGULAR_TOL = 1e-14


class Method(enum.Enum):
    NEWTON_FIXED = "newton"
    DRNM = "drnm"
    ABIKOFF_YE = "ay"


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    UNSTABLE_INPUT = "UnstableInput"
    PRECISION_LIMIT = "PrecisionLimit"


@dataclass(frozen=True)
class SolverConfig:
    method: Method = Method.DRNM
    epsilon: float = 1e-8
    alpha: float = 1.0
    c1: float = 1e-4
    c2: float = 0.9
    max_iter: int = 1000
    max_line_search_steps: int = 60

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if not self.alpha >= 0.0:
            raise ValueError("alpha must be nonnegative")
        if not (0.0 < self.c1 <= 0.5 and self.c1 < self.c2 < 1.0):
            raise ValueError("need 0 < c1 <= 1/2 and c1 < c2 < 1")
        if self.max_iter < 0 or self.max_line_search_steps < 1:
            raise ValueError("iteration limits must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """State at iterate ``w`` and the step taken from it (``tau = 0`` at the last record)."""

    w: np.ndarray
    residual_g: float
    lambda_k: float
    q_k: float
    error_bound: float
    tau_k: float = 0.0
    line_search_evals: int = 0


@dataclass
class SolveTrace:
    records: list = field(default_factory=list)
    status: Status = Status.MAX_ITERATIONS
    message: str = ""

    @property
    def iterations(self) -> int:
        return max(len(self.records) - 1, 0)

    @property
    def q_history(self) -> list:
        return [r.q_k for r in self.records]


@dataclass
class SolveResult:
    barycenter: np.ndarray
    centered: DiscreteMeasure
    error_bound: float
    trace: SolveTrace

    @property
    def status(self) -> Status:
        return self.trace.status

    @property
    def converged(self) -> bool:
        return self.trace.status is Status.CONVERGED

    @property
    def iterations(self) -> int:
        return self.trace.iterations


@dataclass
class _Local:
    """Field data of the measure shifted so that the iterate sits at 0."""

    mu: DiscreteMeasure
    com: np.ndarray
    hess: np.ndarray  # I - sum w_i y_i y_i^T = -grad F at 0
    residual: float
    lam: float

    @property
    def q(self) -> float:
        return 4.0 * self.residual / self.lam**2 if self.lam > 0.0 else math.inf

    @property
    def bound(self) -> float:
        return 2.0 * self.residual / self.lam if self.lam > 0.0 else math.inf


def _local(mu: DiscreteMeasure, w: np.ndarray) -> _Local:
    mk = pushforward(mu, w) if np.any(w) else mu
    com = mk.weights @ mk.atoms
    hess = np.eye(mk.dim) - (mk.atoms.T * mk.weights) @ mk.atoms
    lam = float(smallest_eigenvalue(hess))
    return _Local(mk, com, hess, float(np.linalg.norm(com)), lam)


def _record(w, loc: _Local) -> IterationRecord:
    return IterationRecord(w.copy(), loc.residual, loc.lam, loc.q, loc.bound)


def _finish(w, loc, trace: SolveTrace, status: Status, message: str = "", mu=None) -> SolveResult:
    trace.status = status
    trace.message = message
    if loc is None:
        return SolveResult(w, mu, math.inf, trace)
    return SolveResult(w, loc.mu, loc.bound, trace)


def _initial(mu: DiscreteMeasure, w0):
    if w0 is None:
        return np.zeros(mu.dim)
    w = np.array(ball.as_array(w0), dtype=float)
    if w.shape != (mu.dim,):
        raise GeometryError(f"start point of shape {w.shape} for a measure in dimension {mu.dim}")
    if not np.linalg.norm(w) < 1.0 - BOUNDARY_GUARD:
        raise GeometryError("start point outside the open unit ball")
    return w


def _converged(loc: _Local, eps: float) -> bool:
    return loc.q < 1.0 and loc.bound < eps


def _advance(w, step):
    w_new = ball.shift(-w, ball.exp_origin(step))
    if not np.linalg.norm(w_new) < 1.0 - BOUNDARY_GUARD:
        raise GeometryError("iterate left the representable part of the ball")
    return w_new


def _spd_solve(a, b):
    return cho_solve(cho_factor(a, lower=True, check_finite=True), b)


def radial_merit(mu: DiscreteMeasure, u: np.ndarray):
    """Merit function ``t -> Psi_mu(exp_origin(t u))`` with its derivative.

    Along the ray with unit direction ``e`` and ``s = t |u|`` every atom with
    ``c = <x, e>`` contributes ``log(((1 + c) e^{-2s} + (1 - c) e^{2s}) / 2)``,
    evaluated with ``logaddexp`` so large steps cannot overflow.
    """
    norm_u = float(np.linalg.norm(u))
    c = np.clip(mu.atoms @ (u / norm_u), -1.0, 1.0)
    with np.errstate(divide="ignore"):
        lp, lm = np.log1p(c), np.log1p(-c)
    wts = mu.weights
    log2 = math.log(2.0)

    def f(t):
        s = t * norm_u
        val = wts @ (np.logaddexp(lp - 2.0 * s, lm + 2.0 * s) - log2)
        der = 2.0 * norm_u * (wts @ np.tanh(0.5 * (lm - lp) + 2.0 * s))
        return float(val), float(der)

    return f


def _check_stable(mu, w, trace):
    if not classify_stability(mu).is_stable:
        try:
            loc = _local(mu, w)
            trace.records.append(_record(w, loc))
        except GeometryError:
            loc = None
        return _finish(w, loc, trace, Status.UNSTABLE_INPUT, "measure is not stable", mu)
    return None


def solve_newton_fixed(mu: DiscreteMeasure, w0=None, cfg: SolverConfig | None = None) -> SolveResult:
    """Shifted Riemannian Newton iteration with unit step.

    ``u_k = (I - sum w_i y_i y_i^T)^{-1} F_k(0)`` with ``y_i`` the shifted atoms.
    Converges quadratically whenever ``q < 1`` at the start.
    """
    cfg = cfg or SolverConfig(method=Method.NEWTON_FIXED)
    w = _initial(mu, w0)
    trace = SolveTrace()
    if (bad := _check_stable(mu, w, trace)) is not None:
        return bad
    loc = None
    for k in range(cfg.max_iter + 1):
        try:
            loc = _local(mu, w)
        except GeometryError as exc:
            return _finish(w, loc, trace, Status.PRECISION_LIMIT, str(exc), mu)
        trace.records.append(_record(w, loc))
        if _converged(loc, cfg.epsilon):
            return _finish(w, loc, trace, Status.CONVERGED)
        if loc.lam <= SINGULAR_TOL:
            return _finish(w, loc, trace, Status.PRECISION_LIMIT, "singular derivative")
        if k == cfg.max_iter:
            break
        u = _spd_solve(loc.hess, 0.5 * loc.com)
        trace.records[-1] = _with_step(trace.records[-1], 1.0, 0)
        try:
            w = _advance(w, u)
        except GeometryError as exc:
            return _finish(w, loc, trace, Status.PRECISION_LIMIT, str(exc))
    return _finish(w, loc, trace, Status.MAX_ITERATIONS)


def _with_step(rec: IterationRecord, tau: float, evals: int) -> IterationRecord:
    return IterationRecord(
        rec.w, rec.residual_g, rec.lambda_k, rec.q_k, rec.error_bound, tau, evals
    )


def solve_drnm(mu: DiscreteMeasure, w0=None, cfg: SolverConfig | None = None) -> SolveResult:
    """Damped regularized Newton method.

    Outside the Newton-Kantorovich region the system matrix is shifted by
    ``alpha |F_k|_g^2`` and the step length is chosen by a weak Wolfe line
    search on the potential along the geodesic. Once ``q_k < 1`` the method
    takes plain Newton steps without line search.

    Inputs that are not stable are still attempted; if the run fails the
    status reports ``UnstableInput``.
    """
    cfg = cfg or SolverConfig()
    w = _initial(mu, w0)
    trace = SolveTrace()
    stable = classify_stability(mu).is_stable
    loc = None

    def fail(status, message):
        if not stable:
            status = Status.UNSTABLE_INPUT
        return _finish(w, loc, trace, status, message, mu)

    for k in range(cfg.max_iter + 1):
        try:
            loc = _local(mu, w)
        except GeometryError as exc:
            return fail(Status.PRECISION_LIMIT, str(exc))
        trace.records.append(_record(w, loc))
        if _converged(loc, cfg.epsilon):
            return _finish(w, loc, trace, Status.CONVERGED)
        if k == cfg.max_iter:
            break
        F = 0.5 * loc.com
        r2 = loc.residual**2
        if r2 == 0.0 and loc.lam <= SINGULAR_TOL:
            return fail(Status.PRECISION_LIMIT, "zero residual with singular derivative")

        newton_region = loc.q < 1.0
        alpha = 0.0 if newton_region else cfg.alpha
        try:
            u = _spd_solve(loc.hess + alpha * r2 * np.eye(mu.dim), F)
        except (LinAlgError, ValueError):
            return fail(Status.PRECISION_LIMIT, "regularized system not positive definite")

        tau, evals = 1.0, 0
        if not newton_region:
            merit = radial_merit(loc.mu, u)
            try:
                tau, evals = line_search_weak_wolfe(
                    merit, cfg.c1, cfg.c2, cfg.max_line_search_steps
                )
            except (LineSearchError, ValueError) as exc:
                return fail(Status.PRECISION_LIMIT, f"line search failed: {exc}")
        trace.records[-1] = _with_step(trace.records[-1], tau, evals)
        try:
            w = _advance(w, tau * u)
        except GeometryError as exc:
            return fail(Status.PRECISION_LIMIT, str(exc))
    return fail(Status.MAX_ITERATIONS, "iteration limit reached")


def solve_abikoff_ye(mu: DiscreteMeasure, w0=None, cfg: SolverConfig | None = None) -> SolveResult:
    """Abikoff-Ye iteration: repeatedly shift by the Euclidean center of mass.

    In the shifted picture this is steepest descent on the potential with the
    step ``exp_origin(tau u) = 2 u`` for ``u = F_k(0)``; it converges linearly.
    """
    cfg = cfg or SolverConfig(method=Method.ABIKOFF_YE)
    w = _initial(mu, w0)
    trace = SolveTrace()
    if (bad := _check_stable(mu, w, trace)) is not None:
        return bad
    loc = None
    for k in range(cfg.max_iter + 1):
        try:
            loc = _local(mu, w)
        except GeometryError as exc:
            return _finish(w, loc, trace, Status.PRECISION_LIMIT, str(exc), mu)
        trace.records.append(_record(w, loc))
        if _converged(loc, cfg.epsilon):
            return _finish(w, loc, trace, Status.CONVERGED)
        if k == cfg.max_iter:
            break
        # exp_origin(tau u) = com, i.e. tau = 2 artanh|com| / |com|
        r = loc.residual
        tau = 2.0 * math.atanh(min(r, 1.0 - 1e-16)) / r if r > 0.0 else 2.0
        trace.records[-1] = _with_step(trace.records[-1], tau, 0)
        w_new = ball.shift(-w, loc.com)
        if not np.linalg.norm(w_new) < 1.0 - BOUNDARY_GUARD:
            return _finish(w, loc, trace, Status.PRECISION_LIMIT, "iterate left the ball")
        w = w_new
    return _finish(w, loc, trace, Status.MAX_ITERATIONS, "iteration limit reached")


_SOLVERS = {
    Method.NEWTON_FIXED: solve_newton_fixed,
    Method.DRNM: solve_drnm,
    Method.ABIKOFF_YE: solve_abikoff_ye,
}


def solve(mu: DiscreteMeasure, w0=None, cfg: SolverConfig | None = None) -> SolveResult:
    """Run the method selected in ``cfg`` (DRNM by default)."""
    cfg = cfg or SolverConfig()
    return _SOLVERS[cfg.method](mu, w0, cfg)
