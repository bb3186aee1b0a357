"""Closing open polygonal chains while keeping their edge lengths.

The unit edge directions weighted by normalized edge lengths form a discrete
measure on the sphere; the chain is closed exactly when that measure has zero
center of mass. Shifting the directions by the conformal barycenter produces
such a measure, hence a closed polygon with the original lengths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import ball
from ..errors import ConvergenceError, GeometryError, UnstableMeasureError
from ..measure import DiscreteMeasure, classify_stability
from ..solvers import SolveResult, SolverConfig, solve_drnm


@dataclass(frozen=True, eq=False)
class OpenPolygon:
    """Chain ``origin, origin + l_0 e_0, ...`` given by unit edges and lengths."""

    origin: np.ndarray
    edge_vectors: np.ndarray
    edge_lengths: np.ndarray

    def __post_init__(self):
        e = np.array(self.edge_vectors, dtype=float, ndmin=2)
        lengths = np.array(self.edge_lengths, dtype=float).reshape(-1)
        origin = np.array(self.origin, dtype=float).reshape(-1)
        if e.ndim != 2 or e.shape[1] < 2 or e.shape[0] < 1:
            raise GeometryError(f"edge vectors must have shape (n, d >= 2), got {e.shape}")
        if lengths.shape[0] != e.shape[0] or origin.shape[0] != e.shape[1]:
            raise GeometryError("edge count or dimension mismatch")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0.0):
            raise GeometryError("edge lengths must be positive")
        e = ball.normalize_sphere(e)
        for name, arr in (("origin", origin), ("edge_vectors", e), ("edge_lengths", lengths)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_vertices(cls, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise GeometryError("need at least two vertices")
        diff = np.diff(v, axis=0)
        lengths = np.linalg.norm(diff, axis=1)
        if np.any(lengths == 0.0):
            raise GeometryError("zero-length edge")
        return cls(v[0], diff / lengths[:, None], lengths)

    @classmethod
    def from_edges(cls, directions, lengths, origin=None):
        directions = np.asarray(directions, dtype=float)
        if origin is None:
            origin = np.zeros(directions.shape[-1])
        return cls(origin, directions, lengths)

    @property
    def n(self) -> int:
        return self.edge_lengths.shape[0]

    @property
    def dim(self) -> int:
        return self.origin.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self.edge_lengths / self.edge_lengths.sum()

    @property
    def vertices(self) -> np.ndarray:
        steps = self.edge_lengths[:, None] * self.edge_vectors
        return np.vstack([self.origin, self.origin + np.cumsum(steps, axis=0)])

    @property
    def gap(self) -> float:
        """Normalized closure defect ``|sum_i w_i e_i|``."""
        return float(np.linalg.norm(self.weights @ self.edge_vectors))


@dataclass(frozen=True, eq=False)
class ClosedPolygon(OpenPolygon):
    closure_error: float = 0.0
    barycenter: np.ndarray = None
    result: SolveResult = None


def polygon_to_measure(p: OpenPolygon) -> DiscreteMeasure:
    """Edge directions weighted by normalized edge lengths."""
    return DiscreteMeasure(p.edge_vectors, p.edge_lengths)


def close_polygon(p: OpenPolygon, cfg: SolverConfig | None = None) -> ClosedPolygon:
    """Close ``p`` by the Möbius shift that centers its edge measure.

    Edge lengths are copied unchanged and the first vertex stays in place.
    Raises :class:`UnstableMeasureError` if some direction carries half the
    length or more, and :class:`ConvergenceError` if the solver fails.
    """
    cfg = cfg or SolverConfig()
    mu = polygon_to_measure(p)
    cls = classify_stability(mu)
    if not cls.is_stable:
        raise UnstableMeasureError(
            f"edge measure is {cls.kind.value} (max point mass {cls.max_mass:.6g})"
        )
    res = solve_drnm(mu, None, cfg)
    if not res.converged:
        raise ConvergenceError(f"barycenter solve ended with {res.status.value}", res)
    y = res.centered.atoms
    closure = float(np.linalg.norm(mu.weights @ y))
    return ClosedPolygon(
        p.origin,
        y,
        p.edge_lengths,
        closure_error=closure,
        barycenter=res.barycenter,
        result=res,
    )
