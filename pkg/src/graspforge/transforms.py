"""Minimal rigid-transform helpers shared by the kinematics stack.

Conventions:
  - rotation matrices are 3x3 numpy arrays, right-handed, acting on column vectors
  - rpy means fixed-axis roll/pitch/yaw: R = Rz(yaw) @ Ry(pitch) @ Rx(roll)
  - quaternions are (x, y, z, w), unit norm, w >= 0 canonical form
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def rpy_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Rotation matrix from fixed-axis roll-pitch-yaw angles."""
    cr, sr = np.cos(roll), np.sin(roll)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cy, sy = np.cos(yaw), np.sin(yaw)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])


def matrix_to_rpy(R: np.ndarray) -> tuple[float, float, float]:
    """Inverse of rpy_matrix. Gimbal-locked inputs resolve with roll = 0."""
    sp = -R[2, 0]
    if abs(sp) >= 1.0 - 1e-12:
        # pitch at +-pi/2: roll and yaw are coupled, pick roll = 0
        pitch = np.pi / 2.0 if sp > 0 else -np.pi / 2.0
        return 0.0, float(pitch), float(np.arctan2(-R[0, 1], R[1, 1]))
    pitch = np.arcsin(sp)
    roll = np.arctan2(R[2, 1], R[2, 2])
    yaw = np.arctan2(R[1, 0], R[0, 0])
    return float(roll), float(pitch), float(yaw)


def axis_angle_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    x, y, z = axis
    c, s = np.cos(angle), np.sin(angle)
    C = 1.0 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


def matrix_to_quat(R: np.ndarray) -> np.ndarray:
    """Rotation matrix -> unit quaternion (x, y, z, w) with w >= 0."""
    t = np.trace(R)
    if t > 0.0:
        w = np.sqrt(1.0 + t) / 2.0
        f = 1.0 / (4.0 * w)
        q = np.array([(R[2, 1] - R[1, 2]) * f,
                      (R[0, 2] - R[2, 0]) * f,
                      (R[1, 0] - R[0, 1]) * f, w])
    else:
        i = int(np.argmax([R[0, 0], R[1, 1], R[2, 2]]))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(1.0 + R[i, i] - R[j, j] - R[k, k], 0.0)) * 2.0
        q = np.empty(4)
        q[i] = s / 4.0
        q[j] = (R[j, i] + R[i, j]) / s
        q[k] = (R[k, i] + R[i, k]) / s
        q[3] = (R[k, j] - R[j, k]) / s
    if q[3] < 0.0:
        q = -q
    return q / np.linalg.norm(q)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """Unit quaternion (x, y, z, w) -> rotation matrix."""
    x, y, z, w = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


# --------------------------------------------------------------------------
# fixed rigid transform stored as the authored (xyz, rpy) pair so that
# parse -> serialize -> parse round-trips are field-identical


@dataclass(frozen=True)
class Transform:
    """Rigid transform authored as a translation + fixed-axis rpy rotation."""

    xyz: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rpy: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def rotation(self) -> np.ndarray:
        return rpy_matrix(*self.rpy)

    def translation(self) -> np.ndarray:
        return np.array(self.xyz, dtype=float)

    def apply(self, point: np.ndarray) -> np.ndarray:
        return self.rotation() @ np.asarray(point, dtype=float) + self.translation()

    def compose(self, other: "Transform") -> "Transform":
        """self ∘ other (apply `other` first in the child frame)."""
        R = self.rotation() @ other.rotation()
        t = self.rotation() @ other.translation() + self.translation()
        return Transform(xyz=tuple(float(v) for v in t), rpy=matrix_to_rpy(R))


def compose_rt(Ra: np.ndarray, ta: np.ndarray,
               Rb: np.ndarray, tb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Compose two (rotation, translation) pairs: result = A ∘ B."""
    return Ra @ Rb, Ra @ tb + ta


def invert_rt(R: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return R.T, -(R.T @ t)
