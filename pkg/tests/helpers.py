"""Shared sampling helpers for the tests."""

import numpy as np

from confbary import measure as M


def random_ball(rng, d, rmax=0.9):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v) * rmax * rng.random() ** (1.0 / d)


def random_sphere(rng, d, n=None):
    x = rng.standard_normal((1 if n is None else n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[0] if n is None else x


def covariant_fd(mu, w, X, h=1e-5):
    # Levi-Civita derivative of F along X for the conformal ball metric
    F = M.field_at(mu, w)
    dF = (M.field_at(mu, w + h * X) - M.field_at(mu, w - h * X)) / (2 * h)
    c = 2.0 / (1.0 - w @ w)
    return dF + c * ((w @ X) * F + (w @ F) * X - (X @ F) * w)
