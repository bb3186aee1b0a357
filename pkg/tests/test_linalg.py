import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from confbary.linalg import jacobi_eigh, smallest_eigenvalue


def random_symmetric(rng, shape):
    a = rng.standard_normal(shape)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def test_matches_lapack_batched(rng):
    for d in (2, 3, 4, 6):
        a = random_symmetric(rng, (200, d, d))
        assert np.allclose(jacobi_eigh(a), np.linalg.eigvalsh(a), atol=1e-12)


def test_eigenvectors(rng):
    a = random_symmetric(rng, (50, 3, 3))
    w, v = jacobi_eigh(a, vectors=True)
    assert np.allclose(a @ v, v * w[:, None, :], atol=1e-12)
    assert np.allclose(np.swapaxes(v, -1, -2) @ v, np.eye(3), atol=1e-12)


def test_diagonal_and_repeated():
    assert np.array_equal(jacobi_eigh(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])
    a = np.full((3, 3), 1.0)  # eigenvalues 0, 0, 3
    assert np.allclose(jacobi_eigh(a), [0.0, 0.0, 3.0], atol=1e-14)


def test_second_moment_matrices(rng):
    x = rng.standard_normal((100, 64, 3))
    x /= np.linalg.norm(x, axis=2, keepdims=True)
    a = np.eye(3) - np.einsum("kni,knj->kij", x, x) / 64
    assert np.allclose(smallest_eigenvalue(a), np.linalg.eigvalsh(a)[:, 0], atol=1e-14)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))


@given(arrays(float, (3, 3), elements=st.floats(-1e3, 1e3)))
def test_trace_and_spectrum_property(a):
    a = a + a.T
    w = jacobi_eigh(a)
    scale = max(1.0, np.abs(a).max())
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(a)) <= 1e-12 * scale * 10
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-12 * scale * 10)
