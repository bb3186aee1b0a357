import math

import numpy as np
import pytest
from scipy import stats

from confbary.ensembles import EnsembleKind, EnsembleSpec, rng_for, sample_uniform_sphere, sample_vmf


@pytest.mark.parametrize("d", [2, 3, 5])
def test_uniform_moments(d):
    x = sample_uniform_sphere(d, rng_for(1, 0), 1_000_000)
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-15)
    assert np.linalg.norm(x.mean(axis=0)) <= 0.005
    assert np.abs(x.T @ x / len(x) - np.eye(d) / d).max() <= 0.01


def test_uniform_single_draw():
    x = sample_uniform_sphere(3, rng_for(0, 0))
    assert x.shape == (3,)
    with pytest.raises(ValueError):
        sample_uniform_sphere(1, rng_for(0, 0), 4)


def test_vmf_mean_direction():
    xi = np.array([1.0, 2.0, 2.0]) / 3.0
    x = sample_vmf(20.0, xi, rng_for(2, 0), 100_000)
    m = x.mean(axis=0)
    angle = math.degrees(math.acos(min(1.0, m @ xi / np.linalg.norm(m))))
    assert angle <= 1.0
    # mean resultant length of the vMF law on S^2 is coth(kappa) - 1/kappa
    assert np.linalg.norm(m) == pytest.approx(1 / math.tanh(20.0) - 1 / 20.0, abs=2e-3)


def test_vmf_cosine_law():
    # the cosine t = <x, xi> has density kappa exp(kappa t) / (2 sinh kappa)
    kappa = 3.0
    t = sample_vmf(kappa, [0.0, 0.0, 1.0], rng_for(3, 0), 20_000)[:, 2]

    def cdf(s):
        return np.expm1(kappa * (s + 1)) / np.expm1(2 * kappa)

    assert stats.kstest(t, cdf).pvalue > 1e-3


def test_vmf_small_kappa_is_nearly_uniform():
    x = sample_vmf(1e-6, [0.0, 1.0, 0.0], rng_for(4, 0), 200_000)
    assert np.abs(x.T @ x / len(x) - np.eye(3) / 3).max() <= 0.01


def test_vmf_large_kappa_is_finite():
    x = sample_vmf(1e4, [0.0, 0.0, 1.0], rng_for(5, 0), 1000)
    assert np.all(np.isfinite(x)) and np.all(x[:, 2] > 0.99)


def test_vmf_rejects():
    with pytest.raises(ValueError):
        sample_vmf(0.0, [0, 0, 1.0], rng_for(0, 0))
    with pytest.raises(ValueError):
        sample_vmf(1.0, [0, 0, 2.0], rng_for(0, 0))


def test_streams_are_deterministic_and_independent():
    spec = EnsembleSpec(n=10, N=5, seed=42)
    assert np.array_equal(spec.directions(3), EnsembleSpec(n=10, N=5, seed=42).directions(3))
    assert not np.array_equal(spec.directions(3), spec.directions(4))
    assert not np.array_equal(spec.directions(3), EnsembleSpec(n=10, N=5, seed=43).directions(3))
    # order of generation does not matter
    a = [spec.directions(i) for i in range(5)]
    b = [spec.directions(i) for i in reversed(range(5))][::-1]
    assert all(np.array_equal(u, v) for u, v in zip(a, b))


def test_hardkink_split():
    spec = EnsembleSpec(kind="hardkink", n=101, N=1, kappa=50.0)
    x = spec.directions(0)
    assert x.shape == (101, 3)
    assert np.all(x[:51, 2] > 0.5) and np.all(x[51:, 2] < -0.5)


def test_measures_and_iteration():
    spec = EnsembleSpec(kind=EnsembleKind.VMF, n=8, N=3, kappa=2.0)
    mus = list(spec)
    assert len(mus) == 3
    assert all(np.allclose(mu.weights, 1 / 8) for mu in mus)


@pytest.mark.parametrize(
    "kw", [{"n": 0}, {"d": 1}, {"N": -1}, {"kind": "vmf", "d": 4}, {"kind": "vmf", "kappa": 0.0}, {"kind": "x"}]
)
def test_ensemble_spec_rejects(kw):
    with pytest.raises(ValueError):
        EnsembleSpec(**kw)
