"""Seeded random ensembles of measures and polygons.

Every instance draws from its own Philox stream keyed by ``(seed, index)``,
so instances can be generated in any order or in parallel with identical
results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .measure import DiscreteMeasure

_TINY = 1e-150


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Philox generator for instance ``index`` of the ensemble with ``seed``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def sample_uniform_sphere(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform points on ``S^{d-1}`` as normalized Gaussian vectors."""
    if d < 2:
        raise ValueError("d must be at least 2")
    m = 1 if size is None else int(size)
    x = rng.standard_normal((m, d))
    norms = np.linalg.norm(x, axis=1)
    while np.any(bad := norms < _TINY):
        x[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(x, axis=1)
    x /= norms[:, None]
    return x[0] if size is None else x


def _orthonormal_frame(xi: np.ndarray):
    # two unit vectors completing xi to an orthonormal basis of R^3
    k = int(np.argmin(np.abs(xi)))
    e = np.zeros(3)
    e[k] = 1.0
    a = np.cross(xi, e)
    a /= np.linalg.norm(a)
    return a, np.cross(xi, a)


def sample_vmf(kappa: float, xi, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """von Mises-Fisher samples on ``S^2`` with concentration ``kappa`` and mean ``xi``.

    The cosine ``t = <x, xi>`` has density proportional to ``exp(kappa t)`` on
    [-1, 1] and is drawn by its closed-form inverse CDF; the azimuth is uniform.
    """
    if not kappa > 0.0:
        raise ValueError("kappa must be positive")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,) or abs(np.linalg.norm(xi) - 1.0) > 1e-8:
        raise ValueError("xi must be a unit vector in R^3")
    xi = xi / np.linalg.norm(xi)
    m = 1 if size is None else int(size)
    u = rng.random(m)
    phi = 2.0 * np.pi * rng.random(m)
    t = 1.0 + np.log1p((1.0 - u) * np.expm1(-2.0 * kappa)) / kappa
    t = np.clip(t, -1.0, 1.0)
    s = np.sqrt(np.maximum(0.0, (1.0 - t) * (1.0 + t)))
    a, b = _orthonormal_frame(xi)
    x = t[:, None] * xi + (s * np.cos(phi))[:, None] * a + (s * np.sin(phi))[:, None] * b
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[0] if size is None else x


class EnsembleKind(enum.Enum):
    UNIFORM = "uniform"
    VMF = "vmf"
    HARD_KINK = "hardkink"


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for ``N`` random instances of ``n`` directions in dimension ``d``.

    ``hardkink`` draws the first ``ceil(n/2)`` directions around ``xi`` and
    the rest around ``-xi``, so the corresponding polygon turns back on itself
    halfway.
    """

    kind: EnsembleKind = EnsembleKind.UNIFORM
    n: int = 100
    d: int = 3
    N: int = 100
    seed: int = 0
    kappa: float = 1.0
    xi: tuple = field(default=(0.0, 0.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if self.n < 1 or self.N < 0 or self.d < 2:
            raise ValueError("need n >= 1, N >= 0 and d >= 2")
        if self.kind is not EnsembleKind.UNIFORM:
            if self.d != 3:
                raise ValueError(f"{self.kind.value} ensembles live on S^2 (d = 3)")
            if not self.kappa > 0.0:
                raise ValueError("kappa must be positive")

    def directions(self, index: int) -> np.ndarray:
        """Unit directions of instance ``index``, shape (n, d)."""
        rng = rng_for(self.seed, index)
        if self.kind is EnsembleKind.UNIFORM:
            return sample_uniform_sphere(self.d, rng, self.n)
        xi = np.asarray(self.xi, dtype=float)
        if self.kind is EnsembleKind.VMF:
            return sample_vmf(self.kappa, xi, rng, self.n)
        half = math.ceil(self.n / 2)
        return np.vstack(
            [sample_vmf(self.kappa, xi, rng, half), sample_vmf(self.kappa, -xi, rng, self.n - half)]
        )

    def measure(self, index: int) -> DiscreteMeasure:
        """Equal-weight measure on the directions of instance ``index``."""
        return DiscreteMeasure(self.directions(index))

    def __iter__(self):
        return (self.measure(i) for i in range(self.N))
