"""Poincaré ball model of hyperbolic space in R^d.

Points of the open unit ball carry the metric ``4 |dw|^2 / (1 - |w|^2)^2``.
Besides metric quantities this module provides the hyperbolic translations
``shift(w, .)`` (the Möbius map sending ``w`` to the origin), their extension
to the unit sphere, their differentials, and the director field ``V_x(w)``:
the g-unit tangent at ``w`` of the geodesic ray ending at ``x``.

All functions work on plain ``numpy`` arrays. Arguments that live on the
sphere (``x``) or are evaluated in batches (``z``) may carry leading axes;
the ball point defining a shift (``w``) is always a single vector.
:class:`BallPoint`, :class:`SpherePoint` and :class:`Tangent` are validating
wrappers for API boundaries and are accepted anywhere an array is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigurationError, GeometryError, PrecisionLossError

BOUNDARY_GUARD = 1e-14
SPHERE_TOL = 1e-8


def as_array(p) -> np.ndarray:
    """Coordinates of a wrapper type or array-like as a float array."""
    return np.asarray(getattr(p, "coords", p), dtype=float)


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of the open unit ball, at least 2-dimensional."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 1 or c.shape[0] < 2:
            raise GeometryError(f"ball point must be a vector of length >= 2, got shape {c.shape}")
        if not np.all(np.isfinite(c)) or np.linalg.norm(c) >= 1.0 - BOUNDARY_GUARD:
            raise GeometryError(f"point {c} is not inside the open unit ball")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __repr__(self):
        return f"BallPoint({self.coords.tolist()})"


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """A unit vector. Inputs within 1e-8 of unit norm are renormalized."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 1 or c.shape[0] < 2:
            raise GeometryError(f"sphere point must be a vector of length >= 2, got shape {c.shape}")
        r = np.linalg.norm(c)
        if not abs(r - 1.0) <= SPHERE_TOL:
            raise GeometryError(f"|x| = {r!r} is not within {SPHERE_TOL} of 1")
        c = c / r
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __repr__(self):
        return f"SpherePoint({self.coords.tolist()})"


@dataclass(frozen=True, eq=False)
class Tangent:
    """Tangent vector ``vec`` at ``base``, in ambient (chart) coordinates."""

    base: BallPoint
    vec: np.ndarray

    def __post_init__(self):
        base = self.base if isinstance(self.base, BallPoint) else BallPoint(self.base)
        v = np.array(self.vec, dtype=float)
        if v.shape != base.coords.shape:
            raise GeometryError(f"tangent of shape {v.shape} at a point of dimension {base.dim}")
        v.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "vec", v)

    @property
    def norm_g(self) -> float:
        return hyp_norm(self.base, self.vec)


def normalize_sphere(x, tol: float = SPHERE_TOL) -> np.ndarray:
    """Renormalize rows of ``x`` that are within ``tol`` of unit length; reject the rest."""
    x = as_array(x)
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    if not np.all(np.abs(r - 1.0) <= tol):
        raise GeometryError(f"points are not within {tol} of the unit sphere")
    return x / r


def _check_dims(w: np.ndarray, z: np.ndarray):
    if w.ndim != 1:
        raise GeometryError(f"shift parameter must be a single vector, got shape {w.shape}")
    if z.shape[-1] != w.shape[0]:
        raise GeometryError(f"dimension mismatch: {w.shape[0]} vs {z.shape[-1]}")


def hyp_norm(base, vec) -> float:
    """Length of ``vec`` in the hyperbolic metric at ``base``."""
    base, vec = as_array(base), as_array(vec)
    return 2.0 * np.linalg.norm(vec, axis=-1) / (1.0 - base @ base)


def exp_origin(v) -> np.ndarray:
    """Riemannian exponential at the origin: ``tanh(|v|) v / |v|``.

    Radial geodesics are straight rays; ``v`` may be batched along leading axes.
    """
    v = as_array(v)
    r = np.linalg.norm(v, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(r > 0.0, np.tanh(r) / r, 1.0)
    return scale * v


def shift(w, z) -> np.ndarray:
    """Hyperbolic translation ``sigma_w(z)``; it sends ``w`` to 0.

    The inverse map is ``shift(-w, .)``.
    """
    w, z = as_array(w), as_array(z)
    _check_dims(w, z)
    ww = w @ w
    zz = np.sum(z * z, axis=-1)
    wz = z @ w
    den = 1.0 - 2.0 * wz + ww * zz
    if np.any(den < BOUNDARY_GUARD):
        raise DegenerateConfigurationError("shift denominator below the boundary guard")
    num = (1.0 - ww) * z - (1.0 + zz - 2.0 * wz)[..., None] * w
    return num / den[..., None]


def boundary_shift(w, x) -> np.ndarray:
    """Extension of ``shift(w, .)`` to the unit sphere.

    Geometrically: extend the chord from ``x`` through ``w`` until it meets the
    sphere again at ``p``; the image is ``-p``. Output rows are renormalized.
    """
    w, x = as_array(w), as_array(x)
    _check_dims(w, x)
    ww = w @ w
    diff = x - w
    den = np.sum(diff * diff, axis=-1)  # = 1 - 2<w,x> + |w|^2 for unit x
    if np.any(den < BOUNDARY_GUARD):
        raise PrecisionLossError("ball point too close to a sphere point")
    num = (1.0 - ww) * x - (2.0 * (1.0 - x @ w))[..., None] * w
    y = num / den[..., None]
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


def conformal_factor(w, z) -> float:
    """``C(w, z)``, the scale of the similarity ``d shift(w, .)(z)``."""
    w, z = as_array(w), as_array(z)
    return (1.0 - w @ w) / (1.0 - 2.0 * (w @ z) + (w @ w) * (z @ z))


def shift_differential(w, z) -> np.ndarray:
    """Jacobian of ``shift(w, .)`` at ``z`` as a d x d matrix.

    It is a similarity: ``D @ D.T == C(w, z)**2 * I``.
    """
    w, z = as_array(w), as_array(z)
    _check_dims(w, z)
    ww, zz, wz = w @ w, z @ z, w @ z
    den = 1.0 - 2.0 * wz + ww * zz
    if den < BOUNDARY_GUARD:
        raise DegenerateConfigurationError("shift denominator below the boundary guard")
    m = (
        zz * np.outer(w, w)
        + (np.outer(w, z) - np.outer(z, w))
        - 2.0 * wz * np.outer(w, z)
        + ww * np.outer(z, z)
    )
    return ((1.0 - ww) / den) * (np.eye(w.shape[0]) - (2.0 / den) * m)


def geodesic_distance(w1, w2) -> float:
    """Hyperbolic distance, equal to ``2 artanh |shift(w1, w2)|``.

    Evaluated as ``2 asinh(|w1 - w2| / sqrt((1 - |w1|^2)(1 - |w2|^2)))``, which
    is the same quantity but stays accurate for nearby points close to the
    sphere, where the shift denominator underflows.
    """
    w1, w2 = as_array(w1), as_array(w2)
    a = 1.0 - np.sum(w1 * w1, axis=-1)
    b = 1.0 - np.sum(w2 * w2, axis=-1)
    return 2.0 * np.arcsinh(np.linalg.norm(w1 - w2, axis=-1) / np.sqrt(a * b))


def exp_at(w, v) -> np.ndarray:
    """Riemannian exponential at ``w``, computed by conjugating with ``shift``.

    Moves ``v`` to the origin with ``d shift(w, .)(w)``, exponentiates there and
    translates back with ``shift(-w, .)``.
    """
    w, v = as_array(w), as_array(v)
    u = shift_differential(w, w) @ v
    return shift(-w, exp_origin(u))


def director(w, x) -> np.ndarray:
    """Director ``V_x(w)``: g-unit tangent at ``w`` pointing along the ray to ``x``.

    ``x`` may hold several sphere points along leading axes. At the origin the
    director is ``x / 2``.
    """
    w, x = as_array(w), as_array(x)
    _check_dims(w, x)
    a = 1.0 - w @ w
    diff = x - w
    den = np.sum(diff * diff, axis=-1)
    if np.any(den < BOUNDARY_GUARD):
        raise PrecisionLossError("ball point too close to a sphere point")
    num = (a * a) * x - (2.0 * a * (1.0 - x @ w))[..., None] * w
    return 0.5 * num / den[..., None]
