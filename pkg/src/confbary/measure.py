"""Discrete measures on the unit sphere and the conformal barycenter field.

For ``mu = sum_i w_i delta(x_i)`` the field ``F_mu(w) = sum_i w_i V_{x_i}(w)``
vanishes exactly at the conformal barycenter. ``F_mu`` is minus the hyperbolic
gradient of the potential ``Psi_mu(w) = sum_i w_i log(|x_i - w|^2 / (1 - |w|^2))``,
which is convex, so barycenters are minimizers of ``Psi_mu``.

Operators (covariant derivatives, Hessians) are returned in a g-orthonormal
frame at ``w``. Since the metric is conformal, that frame is a uniform
rescaling of the standard basis and the matrix coincides with the one in
ambient coordinates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import ball
from .ball import BOUNDARY_GUARD, as_array
from .errors import GeometryError, PrecisionLossError
from .linalg import smallest_eigenvalue

CLUSTER_TOL = 1e-12
MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted atoms on the unit sphere ``S^{d-1}``.

    Atoms within 1e-8 of unit length are renormalized; weights are normalized
    to sum to one.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __init__(self, atoms, weights=None):
        atoms = np.array(atoms, dtype=float, ndmin=2)
        if atoms.ndim != 2 or atoms.shape[0] < 1 or atoms.shape[1] < 2:
            raise GeometryError(f"atoms must have shape (n >= 1, d >= 2), got {atoms.shape}")
        atoms = ball.normalize_sphere(atoms)
        if weights is None:
            weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
        weights = np.array(weights, dtype=float).reshape(-1)
        if weights.shape[0] != atoms.shape[0]:
            raise ValueError(f"{atoms.shape[0]} atoms but {weights.shape[0]} weights")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0.0):
            raise ValueError("weights must be finite and nonnegative")
        total = weights.sum()
        if not total > 0.0:
            raise ValueError("weights must have positive sum")
        self._set(atoms, weights / total)

    def _set(self, atoms, weights):
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def _trusted(cls, atoms, weights):
        # atoms already unit, weights already normalized
        obj = object.__new__(cls)
        obj._set(np.array(atoms, dtype=float), np.array(weights, dtype=float))
        return obj

    @property
    def n(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def __repr__(self):
        return f"DiscreteMeasure(n={self.n}, d={self.dim})"


class Stability(enum.Enum):
    STABLE = "Stable"
    NICE_SEMI_STABLE = "NiceSemiStable"
    SEMI_STABLE = "SemiStable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class StabilityClass:
    kind: Stability
    max_mass: float

    @property
    def is_stable(self) -> bool:
        return self.kind is Stability.STABLE


@dataclass(frozen=True)
class NKReport:
    """Newton-Kantorovich diagnostics at a starting point.

    ``q < 1`` certifies quadratic convergence of fixed-step Newton, and
    ``error_bound`` bounds the hyperbolic distance to the barycenter.
    """

    lambda_min: float
    residual_g: float
    q: float
    error_bound: float

    @property
    def certified(self) -> bool:
        return self.q < 1.0


def _check_point(mu: DiscreteMeasure, w) -> np.ndarray:
    w = as_array(w)
    if w.shape != (mu.dim,):
        raise GeometryError(f"point of shape {w.shape} for a measure in dimension {mu.dim}")
    return w


def center_of_mass(mu: DiscreteMeasure) -> np.ndarray:
    return mu.weights @ mu.atoms


def field_at_origin(mu: DiscreteMeasure) -> np.ndarray:
    """``F_mu(0)``, half the center of mass. Its g-norm is ``|center_of_mass|``."""
    return 0.5 * center_of_mass(mu)


def second_moment(mu: DiscreteMeasure) -> np.ndarray:
    return (mu.atoms.T * mu.weights) @ mu.atoms


def grad_field_at_origin(mu: DiscreteMeasure) -> np.ndarray:
    """Covariant derivative of ``F_mu`` at 0: ``sum_i w_i x_i x_i^T - I``."""
    return second_moment(mu) - np.eye(mu.dim)


def field_at(mu: DiscreteMeasure, w) -> np.ndarray:
    w = _check_point(mu, w)
    return mu.weights @ ball.director(w, mu.atoms)


def grad_field_at(mu: DiscreteMeasure, w) -> np.ndarray:
    """Covariant derivative of ``F_mu`` at ``w`` in a g-orthonormal frame.

    In that frame the unit directors have coordinates ``shift(w, .)``-images of
    the atoms, so this equals ``grad_field_at_origin(pushforward(mu, w))``.
    Eigenvalues lie in ``[-1, 0]``.
    """
    w = _check_point(mu, w)
    y = ball.boundary_shift(w, mu.atoms)
    return (y.T * mu.weights) @ y - np.eye(mu.dim)


def potential(mu: DiscreteMeasure, w) -> float:
    """``Psi_mu(w)``, gauged so that ``Psi_mu(0) = 0``."""
    w = _check_point(mu, w)
    diff = mu.atoms - w
    den = np.sum(diff * diff, axis=-1)
    if np.any(den < BOUNDARY_GUARD):
        raise PrecisionLossError("potential evaluated too close to an atom")
    return float(mu.weights @ np.log(den) - math.log1p(-(w @ w)))


def pushforward(mu: DiscreteMeasure, w) -> DiscreteMeasure:
    """Image of ``mu`` under the boundary extension of ``shift(w, .)``."""
    w = _check_point(mu, w)
    return DiscreteMeasure._trusted(ball.boundary_shift(w, mu.atoms), mu.weights)


def cluster_masses(mu: DiscreteMeasure, tol: float = CLUSTER_TOL) -> np.ndarray:
    """Total weight of each group of atoms chained within Euclidean distance ``tol``."""
    if mu.n == 1:
        return mu.weights.copy()
    pairs = cKDTree(mu.atoms).query_pairs(tol, output_type="ndarray")
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else ([], ([], [])),
        shape=(mu.n, mu.n),
    )
    _, labels = connected_components(graph, directed=False)
    return np.bincount(labels, weights=mu.weights)


def classify_stability(mu: DiscreteMeasure) -> StabilityClass:
    """Classify ``mu`` by the largest mass carried by a single point.

    Masses within ``MASS_TOL`` of one half are treated as exactly one half,
    which resolves borderline cases towards the weaker class.
    """
    masses = np.sort(cluster_masses(mu))[::-1]
    top = float(masses[0])
    if top > 0.5 + MASS_TOL:
        kind = Stability.UNSTABLE
    elif top >= 0.5 - MASS_TOL:
        half = np.abs(masses - 0.5) <= MASS_TOL
        if len(masses) >= 2 and half[1] and masses[2:].sum() <= MASS_TOL:
            kind = Stability.NICE_SEMI_STABLE
        else:
            kind = Stability.SEMI_STABLE
    else:
        kind = Stability.STABLE
    return StabilityClass(kind, top)


def nk_report(mu: DiscreteMeasure, w=None) -> NKReport:
    """Newton-Kantorovich quantities at ``w`` (default: the origin).

    At the origin ``lambda_min`` is the smallest eigenvalue of
    ``I - sum_i w_i x_i x_i^T`` and ``|F_mu(0)|_g`` is the length of the center
    of mass; elsewhere the measure is first pushed so that ``w`` becomes 0.
    """
    if w is not None:
        mu = pushforward(mu, w)
    residual = float(np.linalg.norm(center_of_mass(mu)))
    lam = float(smallest_eigenvalue(np.eye(mu.dim) - second_moment(mu)))
    if lam > 0.0:
        q = 4.0 * residual / lam**2
        bound = 2.0 * residual / lam
    else:
        q = bound = math.inf
    return NKReport(lam, residual, q, bound)


def g_inner(w, a, b) -> np.ndarray:
    """Hyperbolic inner product of tangent vectors ``a`` and ``b`` at ``w``."""
    w = as_array(w)
    return 4.0 / (1.0 - w @ w) ** 2 * np.sum(as_array(a) * as_array(b), axis=-1)


def viewing_cosines(mu: DiscreteMeasure, w, X) -> np.ndarray:
    """``<X, V_{x_i}(w)>_g`` for every atom; for g-unit ``X`` this is a cosine."""
    w = _check_point(mu, w)
    return g_inner(w, ball.director(w, mu.atoms), X)


def _check_unit(w, X):
    nx = ball.hyp_norm(w, X)
    if abs(nx - 1.0) > 1e-8:
        raise GeometryError(f"viewing direction must be g-unit, got |X|_g = {nx}")


def cone_mass(mu: DiscreteMeasure, w, X, delta: float) -> float:
    """Mass of the viewing cone ``{y : <X, V_y(w)>_g >= cos(delta)}``."""
    _check_unit(as_array(w), as_array(X))
    return float(mu.weights[viewing_cosines(mu, w, X) >= math.cos(delta)].sum())


def cone_complement_mass(mu: DiscreteMeasure, w, X, beta: float) -> float:
    """Mass outside the double cone ``A(w, X; beta) u A(w, -X; beta)``."""
    _check_unit(as_array(w), as_array(X))
    c = viewing_cosines(mu, w, X)
    return float(mu.weights[np.abs(c) < math.cos(beta)].sum())


def a_priori_radius(eps: float, delta: float) -> float:
    """Hyperbolic radius beyond which ``Psi_mu`` exceeds its value at the certified center.

    Valid when every viewing cone of angle ``delta`` at the center carries mass
    at most ``(1 - eps) / 2``.
    """
    if not eps > 0.0 or not 0.0 < delta < math.pi:
        raise ValueError("need eps > 0 and 0 < delta < pi")
    return -(2.0 / eps) * math.log(math.sin(delta) / 2.0)


DELTA_GRID = tuple(math.pi / 64 * k for k in range(1, 32))


def certify_concentration(mu: DiscreteMeasure, w=None):
    """Find ``(eps, delta)`` with ``mu(A(w, X; delta)) <= (1 - eps) / 2`` for all g-unit ``X``.

    Scans ``delta`` over multiples of pi/64 below pi/2. A cap of angle ``delta``
    containing any atom lies inside the cap of angle ``2 delta`` centred at that
    atom, so bounding the latter over atom directions is a sound certificate.
    Returns the pair maximizing ``eps * sin(delta)**2`` or ``None`` if no grid
    angle certifies.
    """
    if w is not None:
        mu = pushforward(mu, w)
    cos_ij = np.clip(mu.atoms @ mu.atoms.T, -1.0, 1.0)
    best, best_score = None, 0.0
    for delta in DELTA_GRID:
        covered = cos_ij >= math.cos(2.0 * delta)
        eps = 1.0 - 2.0 * float((covered @ mu.weights).max())
        if eps > 0.0 and eps * math.sin(delta) ** 2 > best_score:
            best, best_score = (eps, delta), eps * math.sin(delta) ** 2
    return best
