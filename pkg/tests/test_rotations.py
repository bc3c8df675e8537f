import numpy as np
import pytest
from scipy.spatial.transform import Rotation, Slerp

from moscribe.rotations import (
    cont6d_to_quat,
    matrix_to_quat,
    quat_about_y,
    quat_from_axis_angle,
    quat_mul,
    quat_normalize,
    quat_rotate,
    quat_to_cont6d,
    quat_to_matrix,
    slerp,
    wrap_angle,
    yaw_of_direction,
)

RNG = np.random.default_rng(20240601)


def scipy_rot(q):
    # scipy uses x-y-z-w ordering
    return Rotation.from_quat([q[1], q[2], q[3], q[0]])


def random_quat():
    q = RNG.normal(size=4)
    return q / np.linalg.norm(q)


def test_identity_rotation_is_exact():
    v = np.array([0.123, -4.5, 6.789])
    out = quat_rotate(np.array([1.0, 0.0, 0.0, 0.0]), v)
    assert np.array_equal(out, v)


def test_rotate_matches_scipy():
    for _ in range(50):
        q = random_quat()
        v = RNG.normal(size=3)
        np.testing.assert_allclose(quat_rotate(q, v), scipy_rot(q).apply(v), atol=1e-12)


def test_mul_matches_scipy():
    for _ in range(50):
        a, b = random_quat(), random_quat()
        ours = quat_mul(a, b)
        theirs = (scipy_rot(a) * scipy_rot(b)).as_quat()
        theirs = np.array([theirs[3], theirs[0], theirs[1], theirs[2]])
        if np.dot(ours, theirs) < 0:
            theirs = -theirs
        np.testing.assert_allclose(ours, theirs, atol=1e-12)


def test_matrix_roundtrip():
    for _ in range(50):
        q = random_quat()
        q2 = matrix_to_quat(quat_to_matrix(q))
        if np.dot(q, q2) < 0:
            q2 = -q2
        np.testing.assert_allclose(q, q2, atol=1e-12)


def test_cont6d_roundtrip():
    for _ in range(50):
        q = random_quat()
        q2 = cont6d_to_quat(quat_to_cont6d(q))
        if np.dot(q, q2) < 0:
            q2 = -q2
        np.testing.assert_allclose(q, q2, atol=1e-12)


def test_slerp_endpoints_exact():
    q0, q1 = random_quat(), random_quat()
    assert np.array_equal(slerp(q0, q1, 0.0), q0)
    out = slerp(q0, q1, 1.0)
    assert np.array_equal(out, q1) or np.array_equal(out, -q1)


def test_slerp_matches_scipy_oracle():
    for _ in range(30):
        q0, q1 = random_quat(), random_quat()
        times = [0.0, 1.0]
        oracle = Slerp(times, Rotation.from_quat([
            [q0[1], q0[2], q0[3], q0[0]],
            [q1[1], q1[2], q1[3], q1[0]],
        ]))
        for t in (0.25, 0.5, 2.0 / 3.0, 0.9):
            ours = quat_to_matrix(slerp(q0, q1, t))
            theirs = oracle([t]).as_matrix()[0]
            np.testing.assert_allclose(ours, theirs, atol=1e-9)


def test_slerp_unit_norm():
    for _ in range(30):
        q = slerp(random_quat(), random_quat(), RNG.uniform())
        assert abs(np.linalg.norm(q) - 1.0) < 1e-12


def test_wrap_angle_range():
    angles = RNG.uniform(-20, 20, size=200)
    wrapped = wrap_angle(angles)
    assert np.all(wrapped > -np.pi) and np.all(wrapped <= np.pi)
    np.testing.assert_allclose(np.cos(wrapped), np.cos(angles), atol=1e-12)
    np.testing.assert_allclose(np.sin(wrapped), np.sin(angles), atol=1e-12)
    assert wrap_angle(np.pi) == np.pi
    assert wrap_angle(-np.pi) == np.pi


def test_yaw_of_direction():
    assert yaw_of_direction(np.array([0.0, 0.0, 1.0])) == 0.0
    assert yaw_of_direction(np.array([1.0, 0.0, 0.0])) == pytest.approx(np.pi / 2)


def test_axis_angle_about_y():
    q = quat_from_axis_angle([0, 1, 0], 0.7)
    np.testing.assert_allclose(q, quat_about_y(0.7), atol=1e-15)
    v = quat_rotate(q, np.array([0.0, 0.0, 1.0]))
    np.testing.assert_allclose(v, [np.sin(0.7), 0.0, np.cos(0.7)], atol=1e-12)


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        quat_normalize(np.zeros(4))
