"""Discrete Douady-Earle extension of closed curves on the 2-sphere.

For a curve ``gamma`` from the unit circle to ``S^2`` and a point ``z`` of the
unit disk, the extension value is the conformal barycenter of the image under
``gamma`` of the harmonic measure seen from ``z``. The harmonic measure is
discretized by ``n`` equally spaced quadrature points moved by the boundary
shift ``shift(-z, .)``; its own barycenter is then exactly ``z``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import ball
from ..errors import ConfbaryError, GeometryError
from ..measure import DiscreteMeasure
from ..solvers import SolveResult, SolverConfig, Status, solve_drnm

DEFAULT_RMAX = 0.95


def quadrature_circle(n: int) -> DiscreteMeasure:
    """Uniform measure on ``n`` equally spaced points of the unit circle."""
    if n < 3:
        raise ValueError("quadrature needs at least 3 points")
    t = 2.0 * np.pi * np.arange(n) / n
    return DiscreteMeasure._trusted(np.column_stack([np.cos(t), np.sin(t)]), np.full(n, 1.0 / n))


class SphericalCurve:
    """Closed piecewise-geodesic curve through ``samples`` on the unit 2-sphere.

    Sample ``i`` sits at angle ``2 pi i / m`` on the circle; between samples
    the curve follows the great-circle arc at constant speed. Instances are
    callable on arrays of unit vectors in the plane.
    """

    def __init__(self, samples):
        s = np.array(samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 3 or s.shape[0] < 3:
            raise GeometryError(f"curve samples must have shape (m >= 3, 3), got {s.shape}")
        s = ball.normalize_sphere(s)
        nxt = np.roll(s, -1, axis=0)
        cos = np.sum(s * nxt, axis=1)
        if np.any(cos <= -1.0 + 1e-12):
            raise GeometryError("consecutive samples are antipodal")
        self.samples = s
        self._next = nxt
        self._omega = np.arccos(np.clip(cos, -1.0, 1.0))

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    def __call__(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        theta = np.mod(np.arctan2(p[..., 1], p[..., 0]), 2.0 * np.pi)
        u = theta * (self.m / (2.0 * np.pi))
        i = np.minimum(np.floor(u).astype(int), self.m - 1)
        f = (u - i)[..., None]
        a, b, om = self.samples[i], self._next[i], self._omega[i][..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            so = np.sin(om)
            slerp = (np.sin((1.0 - f) * om) * a + np.sin(f * om) * b) / so
        out = np.where(om > 1e-8, slerp, (1.0 - f) * a + f * b)
        return out / np.linalg.norm(out, axis=-1, keepdims=True)


def pulled_quadrature(z, n: int) -> np.ndarray:
    """Quadrature points moved by ``shift(-z, .)``; their barycenter is ``z``."""
    return ball.boundary_shift(-ball.as_array(z), quadrature_circle(n).atoms)


def douady_earle_point(curve, z, n: int = 720, cfg: SolverConfig | None = None):
    """Extension value at the disk point ``z``.

    ``curve`` is any callable taking unit vectors of shape (k, 2) to unit
    vectors of shape (k, 3). The solver starts from the Euclidean center of
    mass of the pushed atoms.

    Returns
    -------
    point : ndarray, shape (3,)
    result : SolveResult
    """
    cfg = cfg or SolverConfig()
    z = ball.as_array(z)
    if z.shape != (2,):
        raise GeometryError("z must be a point of the unit disk")
    b = np.asarray(curve(pulled_quadrature(z, n)), dtype=float)
    mu = DiscreteMeasure(b)
    w0 = mu.weights @ mu.atoms
    if not np.linalg.norm(w0) < 1.0 - 1e-12:
        w0 = None
    res = solve_drnm(mu, w0, cfg)
    return res.barycenter, res


@dataclass
class ExtensionGrid:
    """Extension sampled on a polar grid of the unit disk.

    Point 0 is the center; ring ``i`` at angle ``j`` is point ``1 + i n_theta + j``.
    With ``boundary`` set the outermost ring lies on the unit circle and its
    images are curve values.
    """

    radii: np.ndarray
    angles: np.ndarray
    params: np.ndarray
    images: np.ndarray
    iterations: np.ndarray
    status: list
    error_bounds: np.ndarray
    boundary: bool = False

    @property
    def n_r(self) -> int:
        return len(self.radii)

    @property
    def n_theta(self) -> int:
        return len(self.angles)

    @property
    def converged_fraction(self) -> float:
        return sum(s == Status.CONVERGED.value for s in self.status) / len(self.status)

    @property
    def solved_iterations(self) -> np.ndarray:
        """Iteration counts of the solved points (boundary ring excluded)."""
        return self.iterations[:-self.n_theta] if self.boundary else self.iterations

    @property
    def median_iterations(self) -> float:
        return float(np.median(self.solved_iterations))

    def triangles(self) -> np.ndarray:
        """Triangulation of the polar grid, zero-based vertex indices."""
        nt = self.n_theta
        j = np.arange(nt)
        jn = (j + 1) % nt
        faces = [np.column_stack([np.zeros(nt, dtype=int), 1 + j, 1 + jn])]
        for i in range(self.n_r - 1):
            a, b = 1 + i * nt + j, 1 + i * nt + jn
            c, d = a + nt, b + nt
            faces.append(np.column_stack([a, c, d]))
            faces.append(np.column_stack([a, d, b]))
        return np.vstack(faces)


def douady_earle_grid(
    curve,
    n_r: int,
    n_theta: int,
    n: int = 720,
    cfg: SolverConfig | None = None,
    r_max: float = DEFAULT_RMAX,
    boundary: bool = False,
    workers: int = 1,
) -> ExtensionGrid:
    """Evaluate the extension on ``n_r`` rings of ``n_theta`` points plus the center.

    Ring radii are ``r_max * (i + 1) / n_r``. Point failures are recorded in
    ``status`` and do not abort the grid.
    """
    cfg = cfg or SolverConfig()
    if n_r < 1 or n_theta < 3:
        raise ValueError("need n_r >= 1 and n_theta >= 3")
    if not 0.0 < r_max < 1.0:
        raise ValueError("r_max must lie in (0, 1)")
    radii = r_max * np.arange(1, n_r + 1) / n_r
    angles = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    params = np.vstack([np.zeros((1, 2))] + [r * ring for r in radii])
    if boundary:
        radii = np.append(radii, 1.0)

    def run(z):
        try:
            point, res = douady_earle_point(curve, z, n, cfg)
            return point, res.iterations, res.status.value, res.error_bound
        except ConfbaryError as exc:
            return np.full(3, np.nan), 0, f"{Status.PRECISION_LIMIT.value}: {exc}", math.inf

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            out = list(pool.map(run, params))
    else:
        out = [run(z) for z in params]

    images = np.array([o[0] for o in out])
    iterations = np.array([o[1] for o in out], dtype=int)
    status = [o[2] for o in out]
    bounds = np.array([o[3] for o in out], dtype=float)
    if boundary:
        params = np.vstack([params, ring])
        images = np.vstack([images, curve(ring)])
        iterations = np.append(iterations, np.zeros(n_theta, dtype=int))
        status += [Status.CONVERGED.value] * n_theta
        bounds = np.append(bounds, np.zeros(n_theta))
    return ExtensionGrid(radii, angles, params, images, iterations, status, bounds, boundary)
