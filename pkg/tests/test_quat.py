"""Quaternion algebra against hand values and the rotation-matrix oracle."""

import numpy as np
import pytest

from dqmotion import quat
from dqmotion.errors import DegenerateNormError

import oracles

ORDERS = oracles.ORDER_POOL


class TestMul:
    def test_identity_left(self, rng):
        q = oracles.random_unit_quat(rng)
        assert np.allclose(quat.mul(quat.identity(), q), q)

    def test_i_squared_is_minus_one(self):
        i = np.array([0.0, 1.0, 0.0, 0.0])
        assert np.allclose(quat.mul(i, i), [-1.0, 0.0, 0.0, 0.0])

    def test_unit_product_stays_unit(self, rng):
        a = oracles.random_unit_quat(rng, (500,))
        b = oracles.random_unit_quat(rng, (500,))
        assert np.all(np.abs(quat.norm(quat.mul(a, b)) - 1.0) < 1e-9)

    def test_norm_is_multiplicative(self, rng):
        a = rng.normal(size=(200, 4)) * 3.0
        b = rng.normal(size=(200, 4)) * 3.0
        got = quat.norm(quat.mul(a, b))
        assert np.all(np.abs(got - quat.norm(a) * quat.norm(b)) < 1e-9 * np.maximum(got, 1))

    def test_matches_matrix_composition(self, rng):
        for _ in range(200):
            a = oracles.random_unit_quat(rng)
            b = oracles.random_unit_quat(rng)
            expected = oracles.quat_matrix(a) @ oracles.quat_matrix(b)
            assert np.allclose(oracles.quat_matrix(quat.mul(a, b)), expected, atol=1e-9)


class TestConjugate:
    def test_identity_self_conjugate(self):
        assert np.allclose(quat.conjugate(quat.identity()), quat.identity())

    def test_sign_flip(self):
        assert np.allclose(quat.conjugate([0.0, 1.0, 2.0, 3.0]), [0.0, -1.0, -2.0, -3.0])

    def test_defining_property(self, rng):
        q = oracles.random_unit_quat(rng, (100,))
        assert np.allclose(quat.mul(q, quat.conjugate(q)), quat.identity(), atol=1e-9)


class TestNormalize:
    def test_scaling(self):
        assert np.allclose(quat.normalize([2.0, 0.0, 0.0, 0.0]), quat.identity())

    def test_idempotent(self, rng):
        q = quat.normalize(rng.normal(size=(100, 4)))
        assert np.max(np.abs(quat.normalize(q) - q)) < 1e-15

    def test_zero_raises(self):
        with pytest.raises(DegenerateNormError):
            quat.normalize(np.zeros(4))


class TestDot:
    def test_self(self, rng):
        q = oracles.random_unit_quat(rng)
        assert np.isclose(quat.dot(q, q), 1.0)

    def test_antipode(self, rng):
        q = oracles.random_unit_quat(rng)
        assert np.isclose(quat.dot(q, -q), -1.0)

    def test_orthogonal(self):
        assert quat.dot(quat.identity(), [0.0, 1.0, 0.0, 0.0]) == 0.0


class TestFromEuler:
    def test_zero_rotation(self):
        for order in ORDERS:
            assert np.allclose(quat.from_euler(np.zeros(3), order), quat.identity())

    def test_half_turn_about_x(self):
        # cos(pi/2) + sin(pi/2) i
        q = quat.from_euler([np.pi, 0.0, 0.0], "ZYX")
        assert np.allclose(q, [0.0, 1.0, 0.0, 0.0], atol=1e-12)

    @pytest.mark.parametrize("order", ORDERS)
    def test_matches_matrix_product(self, rng, order):
        for _ in range(100):
            angles = rng.uniform(-np.pi, np.pi, size=3)
            got = oracles.quat_matrix(quat.from_euler(angles, order))
            assert np.allclose(got, oracles.euler_matrix(angles, order), atol=1e-9)

    def test_batched(self, rng):
        angles = rng.uniform(-np.pi, np.pi, size=(7, 3))
        batched = quat.from_euler(angles, "XZY")
        singles = np.array([quat.from_euler(a, "XZY") for a in angles])
        assert np.allclose(batched, singles)

    def test_bad_order_rejected(self):
        with pytest.raises(ValueError):
            quat.from_euler(np.zeros(3), "XXZ")
        with pytest.raises(ValueError):
            quat.from_euler(np.zeros(3), "XYX")


def _same_rotation(a, b, tol):
    return min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) < tol


class TestToEuler:
    def test_identity(self):
        for order in ORDERS:
            assert np.allclose(quat.to_euler(quat.identity(), order), np.zeros(3))

    def test_half_turn_inverse(self):
        angles = quat.to_euler(np.array([0.0, 1.0, 0.0, 0.0]), "ZYX")
        # Compare as quaternions; the angle values are only unique mod 2*pi.
        assert _same_rotation(quat.from_euler(angles, "ZYX"), [0.0, 1.0, 0.0, 0.0], 1e-9)
        assert np.isclose(abs(angles[0]), np.pi) and angles[1] == 0.0 and angles[2] == 0.0

    @pytest.mark.parametrize("order", ORDERS)
    def test_round_trip_random(self, rng, order):
        for _ in range(1000):
            q = oracles.random_unit_quat(rng)
            back = quat.from_euler(quat.to_euler(q, order), order)
            assert _same_rotation(back, q, 1e-6)

    @pytest.mark.parametrize("order", ORDERS)
    def test_gimbal_pole(self, rng, order):
        # Compose a rotation whose middle axis sits exactly at +-90 degrees.
        for sign in (1.0, -1.0):
            for _ in range(20):
                angles = rng.uniform(-np.pi, np.pi, size=3)
                angles["XYZ".index(order[1])] = sign * np.pi / 2.0
                q = quat.from_euler(angles, order)
                recovered = quat.to_euler(q, order)
                # First angle in the composition order is folded to zero.
                assert recovered["XYZ".index(order[0])] == 0.0
                back = quat.from_euler(recovered, order)
                assert _same_rotation(back, q, 1e-9)

    def test_arcsin_argument_clamped(self):
        # A slightly denormalized quaternion can push the argument past 1.
        q = np.array([0.5, 0.5, 0.5, -0.5]) * (1.0 + 5e-7)
        angles = quat.to_euler(q, "ZYX")
        assert np.all(np.isfinite(angles))

    def test_normalizes_input(self, rng):
        q = oracles.random_unit_quat(rng)
        scaled = q * (1.0 + 1e-7)
        assert np.allclose(quat.to_euler(scaled, "ZYX"), quat.to_euler(q, "ZYX"))


class TestZyxClosedForm:
    """The ZYX extraction must agree with the closed-form two-argument
    arctangent / arcsin expressions in terms of the quaternion components."""

    def test_closed_form(self, rng):
        for _ in range(300):
            q = oracles.random_unit_quat(rng)
            w, x, y, z = q
            if abs(2.0 * (w * y - z * x)) >= 1.0 - 1e-6:
                continue
            alpha = np.arctan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
            beta = np.arcsin(np.clip(2.0 * (w * y - z * x), -1.0, 1.0))
            gamma = np.arctan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
            assert np.allclose(quat.to_euler(q, "ZYX"), [alpha, beta, gamma], atol=1e-9)
