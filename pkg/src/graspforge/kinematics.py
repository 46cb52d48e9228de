"""Forward kinematics and Jacobians over a parsed kinematic chain.

All poses are expressed in the chain's root-link frame unless a caller
composes in a base transform.  Positions are meters, orientations unit
quaternions (x, y, z, w).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .robot_model import KinematicChain
from .transforms import axis_angle_matrix, compose_rt, matrix_to_quat, quat_to_matrix, rpy_matrix


class KinematicsError(ValueError):
    """Unknown link or a joint value missing from the state."""


@dataclass(frozen=True)
class Pose:
    """Position + orientation quaternion (x, y, z, w)."""

    position: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.0, 1.0]))

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        q = np.asarray(self.orientation, dtype=float).reshape(4)
        n = np.linalg.norm(q)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"orientation quaternion must be unit norm, got |q| = {n}")
        object.__setattr__(self, "orientation", q)

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return (np.array_equal(self.position, other.position)
                and np.array_equal(self.orientation, other.orientation))

    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)

    @classmethod
    def from_rpy(cls, position, rpy=(0.0, 0.0, 0.0)) -> "Pose":
        return cls(position=np.asarray(position, dtype=float),
                   orientation=matrix_to_quat(rpy_matrix(*rpy)))


@dataclass
class JointState:
    """Joint angles in radians keyed by joint index into chain.joints."""

    values: dict[int, float]

    def copy(self) -> "JointState":
        return JointState(values=dict(self.values))

    def get(self, joint: int) -> float:
        try:
            return self.values[joint]
        except KeyError:
            raise KinematicsError(f"state has no value for joint index {joint}") from None


def zero_state(chain: KinematicChain) -> JointState:
    return JointState(values={ji: 0.0 for ji in chain.movable})


def neutral_state(chain: KinematicChain) -> JointState:
    """All-zero angles clamped into limits: the controller's start posture."""
    return clamp_to_limits(chain, zero_state(chain))


def mid_range_state(chain: KinematicChain) -> JointState:
    return JointState(values={
        ji: 0.5 * (chain.joints[ji].lower_limit + chain.joints[ji].upper_limit)
        for ji in chain.movable})


def clamp_to_limits(chain: KinematicChain, state: JointState) -> JointState:
    """Clamp every provided joint value into its [lower, upper] range."""
    clamped = {}
    for ji, value in state.values.items():
        j = chain.joints[ji]
        clamped[ji] = min(max(value, j.lower_limit), j.upper_limit)
    return JointState(values=clamped)


def within_limits(chain: KinematicChain, state: JointState, tol: float = 0.0) -> bool:
    return all(chain.joints[ji].lower_limit - tol <= v <= chain.joints[ji].upper_limit + tol
               for ji, v in state.values.items())


# --------------------------------------------------------------------------
# pose walks


def _resolve_link(chain: KinematicChain, link) -> int:
    if isinstance(link, str):
        try:
            return chain.link_index[link]
        except KeyError:
            raise KinematicsError(f"unknown link {link!r}") from None
    li = int(link)
    if not 0 <= li < len(chain.links):
        raise KinematicsError(f"link index {li} out of range")
    return li


def link_transform(chain: KinematicChain, state: JointState, link) -> tuple[np.ndarray, np.ndarray]:
    """(rotation, translation) of `link` in the root frame. Fast-path API."""
    li = _resolve_link(chain, link)
    R = np.eye(3)
    t = np.zeros(3)
    for ji in chain.path_to_link[li]:
        j = chain.joints[ji]
        R, t = compose_rt(R, t, j.origin.rotation(), j.origin.translation())
        if j.kind == "revolute":
            angle = state.get(ji)
            R = R @ axis_angle_matrix(np.array(j.axis), angle)
    return R, t


def forward_kinematics(chain: KinematicChain, state: JointState, link) -> Pose:
    """Pose of `link` (name or index) in the root frame."""
    R, t = link_transform(chain, state, link)
    return Pose(position=t, orientation=matrix_to_quat(R))


def jacobian(chain: KinematicChain, state: JointState, link) -> np.ndarray:
    """Positional Jacobian of `link`'s origin, shape (3, len(chain.movable)).

    Column for movable joint j is axis_j x (p_link - p_joint_j) when j lies
    on the path to the link, zero otherwise.
    """
    li = _resolve_link(chain, link)
    J = np.zeros((3, len(chain.movable)))
    col_of = {ji: c for c, ji in enumerate(chain.movable)}
    R = np.eye(3)
    t = np.zeros(3)
    frames = []  # (joint index, world axis, joint origin position)
    for ji in chain.path_to_link[li]:
        j = chain.joints[ji]
        R, t = compose_rt(R, t, j.origin.rotation(), j.origin.translation())
        if j.kind == "revolute":
            frames.append((ji, R @ np.array(j.axis), t.copy()))
            R = R @ axis_angle_matrix(np.array(j.axis), state.get(ji))
    p_link = t
    for ji, axis_w, p_joint in frames:
        J[:, col_of[ji]] = np.cross(axis_w, p_link - p_joint)
    return J
