import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from confbary import ball
from confbary.ball import BallPoint, SpherePoint, Tangent
from confbary.errors import DegenerateConfigurationError, GeometryError, PrecisionLossError
from helpers import random_ball, random_sphere


def dist_oracle(a, b):
    # closed form of the ball metric distance, independent of shift
    num = 2.0 * np.sum((a - b) ** 2)
    return math.acosh(1.0 + num / ((1.0 - a @ a) * (1.0 - b @ b)))


def mobius_disk(w, z):
    # planar translation as a complex Mobius map sending w to 0
    wc, zc = complex(*w), complex(*z)
    r = (zc - wc) / (1.0 - wc.conjugate() * zc)
    return np.array([r.real, r.imag])


ball_vec = st.integers(2, 5).flatmap(
    lambda d: arrays(float, d, elements=st.floats(-1, 1)).filter(
        lambda v: 0.0 < np.linalg.norm(v) <= 1.0
    )
)


class TestTypes:
    def test_ball_point_rejects_boundary(self):
        with pytest.raises(GeometryError):
            BallPoint([1.0, 0.0])
        with pytest.raises(GeometryError):
            BallPoint([1.0 - 1e-15, 0.0])
        with pytest.raises(GeometryError):
            BallPoint([0.5])
        assert BallPoint([0.5, 0.5]).dim == 2

    def test_sphere_point_renormalizes(self):
        p = SpherePoint([1.0 + 5e-9, 0.0, 0.0])
        assert abs(np.linalg.norm(p.coords) - 1.0) <= 1e-12
        with pytest.raises(GeometryError):
            SpherePoint([1.1, 0.0])

    def test_wrappers_are_immutable(self):
        p = BallPoint([0.1, 0.2])
        with pytest.raises(ValueError):
            p.coords[0] = 0.3

    def test_tangent_norm(self):
        t = Tangent(BallPoint([0.5, 0.0]), [0.0, 1.0])
        assert t.norm_g == pytest.approx(8.0 / 3.0, abs=1e-15)
        with pytest.raises(GeometryError):
            Tangent([0.1, 0.1], [1.0, 0.0, 0.0])

    def test_wrappers_accepted_by_ops(self):
        w = BallPoint([0.3, 0.1])
        x = SpherePoint([0.0, 1.0])
        assert np.allclose(ball.boundary_shift(w, x), ball.boundary_shift(w.coords, x.coords))


class TestHypNorm:
    def test_examples(self):
        assert ball.hyp_norm(np.zeros(3), np.array([1.0, 0, 0])) == pytest.approx(2.0)
        assert ball.hyp_norm(np.array([0.3, 0.4]), np.zeros(2)) == 0.0
        assert ball.hyp_norm(np.array([0.5, 0.0]), np.array([0.0, 1.0])) == pytest.approx(8 / 3)


class TestExpOrigin:
    def test_zero(self):
        assert np.array_equal(ball.exp_origin(np.zeros(3)), np.zeros(3))

    def test_radial(self):
        assert np.allclose(ball.exp_origin([0.7, 0.0]), [math.tanh(0.7), 0.0], atol=1e-16)

    def test_distance_consistency(self, rng):
        for _ in range(200):
            v = random_sphere(rng, 3) * rng.random()
            d = ball.geodesic_distance(np.zeros(3), ball.exp_origin(v))
            assert abs(d - 2 * np.linalg.norm(v)) <= 1e-12

    def test_batched(self, rng):
        v = rng.standard_normal((4, 5, 3))
        out = ball.exp_origin(v)
        assert out.shape == v.shape
        assert np.allclose(out[2, 3], ball.exp_origin(v[2, 3]))


class TestShift:
    def test_examples(self, rng):
        w = np.array([0.3, -0.2, 0.5])
        assert np.allclose(ball.shift(w, w), 0.0, atol=1e-15)
        z = random_ball(rng, 3)
        assert np.allclose(ball.shift(np.zeros(3), z), z, atol=0)
        for t in (-0.9, -0.3, 0.4, 1.5):
            expected = (t - 1.0) / (1.0 - t * (w @ w)) * w
            assert np.allclose(ball.shift(w, t * w), expected, atol=1e-15)

    def test_planar_oracle(self, rng):
        for _ in range(200):
            w, z = random_ball(rng, 2, 0.99), random_ball(rng, 2, 0.99)
            assert np.allclose(ball.shift(w, z), mobius_disk(w, z), atol=1e-10)

    def test_group_law(self, rng):
        for d in (2, 3, 4):
            for _ in range(200):
                w, z = random_ball(rng, d, 0.99), random_ball(rng, d, 0.99)
                assert np.allclose(ball.shift(-w, ball.shift(w, z)), z, atol=1e-10)

    def test_isometry(self, rng):
        for _ in range(200):
            w, a, b = (random_ball(rng, 3, 0.9) for _ in range(3))
            assert ball.geodesic_distance(ball.shift(w, a), ball.shift(w, b)) == pytest.approx(
                dist_oracle(a, b), rel=1e-9
            )

    def test_batched_matches_loop(self, rng):
        w = random_ball(rng, 3)
        z = np.array([random_ball(rng, 3) for _ in range(7)])
        out = ball.shift(w, z)
        for zi, oi in zip(z, out):
            assert np.allclose(ball.shift(w, zi), oi, atol=1e-16)

    def test_degenerate(self):
        w = np.array([1.0 - 1e-9, 0.0])
        z = np.array([1.0 / (1.0 - 1e-9), 0.0])  # outside the ball where the denominator vanishes
        with pytest.raises(DegenerateConfigurationError):
            ball.shift(w, z)

    def test_dimension_mismatch(self):
        with pytest.raises(GeometryError):
            ball.shift(np.zeros(2), np.zeros(3))

    @given(ball_vec)
    def test_group_law_property(self, v):
        w = 0.99 * v
        z = 0.5 * v[::-1]
        assert np.allclose(ball.shift(-w, ball.shift(w, z)), z, atol=1e-10)


def secant_oracle(w, x):
    # far end of the chord from x through w, reflected through 0
    u = w - x
    t = -2.0 * (x @ u) / (u @ u)
    return -(x + t * u)


class TestBoundaryShift:
    def test_identity(self, rng):
        x = random_sphere(rng, 3)
        assert np.allclose(ball.boundary_shift(np.zeros(3), x), x, atol=1e-16)

    def test_fixes_own_direction(self, rng):
        x = random_sphere(rng, 4)
        for r in (0.1, 0.5, 0.99):
            assert np.allclose(ball.boundary_shift(r * x, x), x, atol=1e-13)

    def test_secant_example(self):
        w, x = np.array([0.3, 0.0]), np.array([0.0, 1.0])
        expected = secant_oracle(w, x)
        assert np.allclose(expected, [-0.55045871559633, 0.83486238532110], atol=1e-13)
        assert np.allclose(ball.boundary_shift(w, x), expected, atol=1e-14)

    def test_secant_sweep(self, rng):
        for d in (2, 3):
            for _ in range(200):
                w, x = random_ball(rng, d, 0.95), random_sphere(rng, d)
                assert np.allclose(ball.boundary_shift(w, x), secant_oracle(w, x), atol=1e-10)

    def test_limit_of_interior_shift(self, rng):
        w, x = random_ball(rng, 3, 0.8), random_sphere(rng, 3)
        z = (1.0 - 1e-9) * x
        assert np.allclose(ball.boundary_shift(w, x), ball.shift(w, z), atol=1e-7)

    def test_unit_output(self, rng):
        w = random_ball(rng, 3, 0.999)
        y = ball.boundary_shift(w, random_sphere(rng, 3, 50))
        assert np.allclose(np.linalg.norm(y, axis=1), 1.0, atol=1e-15)

    def test_precision_loss(self):
        x = np.array([0.0, 1.0])
        with pytest.raises(PrecisionLossError):
            ball.boundary_shift((1 - 1e-8) * x, x)

    def test_shift_distance_bound(self, rng):
        for d in (2, 3):
            for _ in range(300):
                w1, w2 = random_ball(rng, d, 0.95), random_ball(rng, d, 0.95)
                x = random_sphere(rng, d)
                y1, y2 = ball.boundary_shift(w1, x), ball.boundary_shift(w2, x)
                angle = math.acos(min(1.0, max(-1.0, y1 @ y2)))
                assert angle <= 2.0 * ball.geodesic_distance(w1, w2) + 1e-10


class TestDifferential:
    def test_identity_at_zero_shift(self, rng):
        assert np.allclose(ball.shift_differential(np.zeros(3), random_ball(rng, 3)), np.eye(3))

    def test_at_own_point(self, rng):
        w = random_ball(rng, 3)
        assert np.allclose(ball.shift_differential(w, w), np.eye(3) / (1 - w @ w), atol=1e-12)

    def test_conformality(self, rng):
        for d in (2, 3, 5):
            for _ in range(200):
                w, z = random_ball(rng, d, 0.99), random_ball(rng, d, 0.99)
                D = ball.shift_differential(w, z)
                c = ball.conformal_factor(w, z)
                assert np.allclose(D @ D.T / c**2, np.eye(d), atol=1e-12)

    def test_finite_differences(self, rng):
        h = 1e-5
        for _ in range(100):
            w, z = random_ball(rng, 3, 0.9), random_ball(rng, 3, 0.9)
            D = ball.shift_differential(w, z)
            fd = np.column_stack(
                [(ball.shift(w, z + h * e) - ball.shift(w, z - h * e)) / (2 * h) for e in np.eye(3)]
            )
            assert np.linalg.norm(fd - D) <= 1e-6 * np.linalg.norm(D)


class TestDistance:
    def test_examples(self, rng):
        w = random_ball(rng, 3)
        assert ball.geodesic_distance(w, w) <= 1e-15
        for t in (0.1, 0.5, 0.9):
            assert ball.geodesic_distance(np.zeros(3), np.array([t, 0, 0])) == pytest.approx(
                math.log((1 + t) / (1 - t)), rel=1e-14
            )

    def test_oracle_and_symmetry(self, rng):
        for _ in range(200):
            a, b = random_ball(rng, 3, 0.95), random_ball(rng, 3, 0.95)
            assert ball.geodesic_distance(a, b) == pytest.approx(dist_oracle(a, b), rel=1e-9)
            assert ball.geodesic_distance(a, b) == pytest.approx(ball.geodesic_distance(b, a), rel=1e-12)

    def test_triangle_inequality(self, rng):
        for _ in range(1000):
            a, b, c = (random_ball(rng, 3, 0.95) for _ in range(3))
            dab, dbc, dac = (ball.geodesic_distance(*p) for p in ((a, b), (b, c), (a, c)))
            assert dac <= dab + dbc + 1e-10


class TestExpAt:
    def test_zero_vector(self, rng):
        w = random_ball(rng, 3)
        assert np.allclose(ball.exp_at(w, np.zeros(3)), w, atol=1e-15)

    def test_at_origin(self, rng):
        v = rng.standard_normal(3)
        assert np.allclose(ball.exp_at(np.zeros(3), v), ball.exp_origin(v), atol=1e-16)

    def test_distance_identity(self, rng):
        for _ in range(1000):
            w = random_ball(rng, 3, 0.9)
            v = rng.standard_normal(3) * 0.2 * (1 - w @ w)
            d = ball.geodesic_distance(w, ball.exp_at(w, v))
            assert abs(d - ball.hyp_norm(w, v)) <= 1e-10 * max(1.0, d)

    def test_initial_velocity(self, rng):
        w = random_ball(rng, 3, 0.7)
        v = rng.standard_normal(3)
        h = 1e-6
        fd = (ball.exp_at(w, h * v) - ball.exp_at(w, -h * v)) / (2 * h)
        assert np.allclose(fd, v, rtol=1e-7, atol=1e-9)


class TestDirector:
    def test_at_origin(self, rng):
        x = random_sphere(rng, 3)
        assert np.allclose(ball.director(np.zeros(3), x), x / 2, atol=1e-16)

    def test_unit_length(self, rng):
        for d in (2, 3):
            for _ in range(1000):
                w, x = random_ball(rng, d, 0.99), random_sphere(rng, d)
                assert abs(ball.hyp_norm(w, ball.director(w, x)) - 1.0) <= 1e-12

    def test_equivariance(self, rng):
        for _ in range(200):
            w, x = random_ball(rng, 3, 0.95), random_sphere(rng, 3)
            lhs = ball.shift_differential(w, w) @ ball.director(w, x)
            rhs = ball.director(np.zeros(3), ball.boundary_shift(w, x))
            assert np.allclose(lhs, rhs, atol=1e-10)

    def test_points_along_geodesic_to_x(self, rng):
        for _ in range(50):
            w, x = random_ball(rng, 3, 0.9), random_sphere(rng, 3)
            end = ball.exp_at(w, 40.0 * ball.director(w, x))
            assert np.linalg.norm(end - x) < 1e-6

    def test_batched(self, rng):
        w = random_ball(rng, 3)
        x = random_sphere(rng, 3, 6)
        out = ball.director(w, x)
        assert np.allclose(out[4], ball.director(w, x[4]), atol=1e-16)

    def test_precision_loss(self):
        x = np.array([1.0, 0.0, 0.0])
        with pytest.raises(PrecisionLossError):
            ball.director((1 - 1e-8) * x, x)
