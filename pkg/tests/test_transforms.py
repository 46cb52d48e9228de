import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graspforge.transforms import (Transform, axis_angle_matrix, compose_rt, invert_rt,
                                   matrix_to_quat, matrix_to_rpy, quat_to_matrix,
                                   rpy_matrix)

angles = st.floats(-np.pi, np.pi, allow_nan=False)
# keep pitch away from the +-pi/2 gimbal band so rpy round trips are unique
safe_pitch = st.floats(-1.4, 1.4)


def test_rpy_yaw_quarter_turn_sends_x_to_y():
    R = rpy_matrix(0.0, 0.0, np.pi / 2)
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-12)


def test_rpy_roll_quarter_turn_sends_y_to_z():
    R = rpy_matrix(np.pi / 2, 0.0, 0.0)
    assert np.allclose(R @ [0, 1, 0], [0, 0, 1], atol=1e-12)


@given(angles, safe_pitch, angles)
def test_rpy_round_trip(roll, pitch, yaw):
    R = rpy_matrix(roll, pitch, yaw)
    assert np.allclose(rpy_matrix(*matrix_to_rpy(R)), R, atol=1e-9)


@given(angles, safe_pitch, angles)
def test_rpy_matrix_is_special_orthogonal(roll, pitch, yaw):
    R = rpy_matrix(roll, pitch, yaw)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


def test_matrix_to_rpy_gimbal_lock_picks_zero_roll():
    roll, pitch, yaw = matrix_to_rpy(rpy_matrix(0.3, np.pi / 2, 0.2))
    assert roll == 0.0
    assert pitch == pytest.approx(np.pi / 2)


def test_axis_angle_about_z_matches_rpy_yaw():
    R = axis_angle_matrix(np.array([0.0, 0.0, 1.0]), 0.7)
    assert np.allclose(R, rpy_matrix(0.0, 0.0, 0.7), atol=1e-12)


def test_axis_angle_zero_is_identity():
    assert np.allclose(axis_angle_matrix(np.array([1.0, 0.0, 0.0]), 0.0), np.eye(3))


@given(angles, safe_pitch, angles)
def test_quat_round_trip(roll, pitch, yaw):
    R = rpy_matrix(roll, pitch, yaw)
    q = matrix_to_quat(R)
    assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-12)
    assert q[3] >= 0.0
    assert np.allclose(quat_to_matrix(q), R, atol=1e-9)


def test_quat_identity():
    assert np.allclose(matrix_to_quat(np.eye(3)), [0, 0, 0, 1])


def test_quat_half_turn_about_x():
    # trace = -1 exercises the argmax branch of the conversion
    R = axis_angle_matrix(np.array([1.0, 0.0, 0.0]), np.pi)
    assert np.allclose(matrix_to_quat(R), [1, 0, 0, 0], atol=1e-12)


def test_transform_apply_matches_rotation_plus_translation():
    t = Transform(xyz=(1.0, 2.0, 3.0), rpy=(0.0, 0.0, np.pi / 2))
    assert np.allclose(t.apply([1.0, 0.0, 0.0]), [1.0, 3.0, 3.0], atol=1e-12)


@given(angles, safe_pitch, angles, st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_transform_compose_agrees_with_sequential_apply(roll, pitch, yaw, x, y, z):
    a = Transform(xyz=(x, y, z), rpy=(roll, pitch, yaw))
    b = Transform(xyz=(z, x, y), rpy=(yaw, pitch * 0.5, roll))
    p = np.array([0.3, -0.7, 1.1])
    assert np.allclose(a.compose(b).apply(p), a.apply(b.apply(p)), atol=1e-8)


@given(angles, safe_pitch, angles, st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_invert_rt_undoes_compose_rt(roll, pitch, yaw, x, y, z):
    R = rpy_matrix(roll, pitch, yaw)
    t = np.array([x, y, z])
    Ri, ti = invert_rt(R, t)
    Rc, tc = compose_rt(R, t, Ri, ti)
    assert np.allclose(Rc, np.eye(3), atol=1e-12)
    assert np.allclose(tc, 0.0, atol=1e-12)
