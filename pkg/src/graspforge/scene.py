"""World state: hand base pose, target object, and contact physics parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import Pose
from .robot_model import KinematicChain, bundled_hand_path, load_robot_description

__all__ = [
    "SceneError",
    "PhysicalParams",
    "SceneObject",
    "Scene",
    "make_box_object",
    "default_scene",
    "default_grasp_targets",
    "world_from_base",
    "base_from_world",
    "DEFAULT_HAND_BASE_POSITION",
    "DEFAULT_HAND_BASE_RPY",
    "DEFAULT_BOX_HALF_EXTENTS",
    "DEFAULT_BOX_POSITION",
    "DEFAULT_BOX_MASS",
]


class SceneError(ValueError):
    """Raised for invalid scene parameters (non-positive dimensions, bad physics values)."""


@dataclass(frozen=True)
class PhysicalParams:
    """Contact and joint physics constants shared by hand and object."""

    lateral_friction: float = 1.0
    spinning_friction: float = 0.1
    rolling_friction: float = 0.1
    contact_stiffness: float = 10000.0  # N/m
    contact_damping: float = 1.0
    joint_damping: float = 0.5
    contact_force_threshold: float = 0.5  # N

    def __post_init__(self):
        for name in (
            "lateral_friction",
            "spinning_friction",
            "rolling_friction",
            "contact_stiffness",
            "contact_damping",
            "joint_damping",
            "contact_force_threshold",
        ):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise SceneError(f"{name} must be finite and >= 0, got {value!r}")
        if self.contact_stiffness <= 0.0:
            raise SceneError("contact_stiffness must be > 0")


@dataclass(frozen=True)
class SceneObject:
    """A box-shaped graspable body."""

    id: str
    half_extents: tuple[float, float, float]
    pose: Pose
    mass: float
    params: PhysicalParams = field(default_factory=PhysicalParams)


@dataclass(frozen=True)
class Scene:
    """Hand + object world.

    The object must not start out penetrating the hand by more than 1 mm;
    the bundled defaults keep 2 cm of clearance between palm surface and box.
    """

    chain: KinematicChain
    hand_base: Pose
    object: SceneObject
    hand_params: PhysicalParams = field(default_factory=PhysicalParams)


def make_box_object(
    half_extents,
    pose: Pose,
    mass: float,
    params: PhysicalParams | None = None,
    id: str = "box",
) -> SceneObject:
    """Build a box object, validating dimensions and mass."""
    hx, hy, hz = (float(v) for v in half_extents)
    for v in (hx, hy, hz):
        if not math.isfinite(v) or v <= 0.0:
            raise SceneError(f"box half-extents must be positive, got {half_extents!r}")
    if not math.isfinite(mass) or mass <= 0.0:
        raise SceneError(f"mass must be positive, got {mass!r}")
    return SceneObject(
        id=id,
        half_extents=(hx, hy, hz),
        pose=pose,
        mass=float(mass),
        params=params if params is not None else PhysicalParams(),
    )


# Hand hangs palm-down: roll pi flips base z toward the work volume below.
DEFAULT_HAND_BASE_POSITION = (0.0, 0.0, 0.25)
DEFAULT_HAND_BASE_RPY = (math.pi, 0.0, 0.0)

# Box sized and placed so the palm-facing face sits 2 cm under the palm
# surface (palm half-thickness 0.012 + clearance 0.020 = 0.032 in base z).
DEFAULT_BOX_HALF_EXTENTS = (0.030, 0.025, 0.030)
DEFAULT_BOX_POSITION = (0.060, 0.0, 0.188)
DEFAULT_BOX_MASS = 0.2


def default_scene(chain: KinematicChain | None = None) -> Scene:
    """Bundled hand above the default box; deterministic and value-comparable."""
    if chain is None:
        chain = load_robot_description(bundled_hand_path())
    hand_base = Pose.from_rpy(DEFAULT_HAND_BASE_POSITION, DEFAULT_HAND_BASE_RPY)
    obj = make_box_object(
        DEFAULT_BOX_HALF_EXTENTS,
        Pose.from_rpy(DEFAULT_BOX_POSITION, (0.0, 0.0, 0.0)),
        DEFAULT_BOX_MASS,
    )
    return Scene(chain=chain, hand_base=hand_base, object=obj)


def world_from_base(scene: Scene, p_base) -> np.ndarray:
    """Map a point from the hand-base frame into the world frame."""
    R = scene.hand_base.rotation()
    return R @ np.asarray(p_base, dtype=float) + scene.hand_base.position


def base_from_world(scene: Scene, p_world) -> np.ndarray:
    R = scene.hand_base.rotation()
    return R.T @ (np.asarray(p_world, dtype=float) - scene.hand_base.position)


# Fingertip ball radius of the bundled hand; target points sit inside the box
# surface by (ball radius - offset) so the servo presses until latched.
_TIP_RADIUS = 0.008
_TARGET_OFFSET = 0.0045  # ball-center distance from the surface feature (3.5 mm press)

# Edge-press direction for index/pinky: mostly lateral with an upward tilt
# that parks the ball ~0.9 mm palm-side of the top-face plane.  The lateral
# sweep of these two fingers is the last motion before the grasp validates,
# so the contact normals keep a z component between the first-touch value
# (~0.15) and the at-rest value (0.20) -- enough out-of-plane stiffness to
# resist palm-axis pushes while the sum of the four unit normals stays
# inside the closure budget.
_EDGE_TILT = (0.0, 0.9797958971132712, -0.2)


def default_grasp_targets(scene: Scene) -> dict[str, Pose]:
    """Per-finger fingertip ball-center targets for a four-contact box pinch.

    Index and pinky press the two palm-side lateral edges of the box, middle
    hooks over and presses the far face back toward the palm, the thumb
    presses the near face, and the ring parks above the far face out of
    contact. All points are expressed in the world frame.
    """
    R_obj = scene.object.pose.rotation()
    if not np.allclose(R_obj, np.eye(3), atol=1e-12):
        raise SceneError("default grasp targets require an axis-aligned box")
    c = base_from_world(scene, scene.object.pose.position)
    hx, hy, hz = scene.object.half_extents
    top = c[2] - hz  # palm-facing face height in base frame
    tilt = np.asarray(_EDGE_TILT)

    index_c = np.array([c[0] + 0.020, c[1] + hy, top]) + _TARGET_OFFSET * tilt
    pinky_c = np.array([c[0] + 0.020, c[1] - hy, top]) + _TARGET_OFFSET * (tilt * (1.0, -1.0, 1.0))
    middle_c = np.array([c[0] + hx + _TARGET_OFFSET, c[1] + 0.011, top + 0.010])
    # Thumb presses near the top of the near face: low enough for a face-interior
    # contact, high enough that the middle phalanx clears the palm-side edge.
    thumb_c = np.array([c[0] - hx - _TARGET_OFFSET, c[1] + 0.010, top + 0.010])
    # Ring parks past the far top edge, radially off the edge so the whole
    # finger stays > 5 mm clear of the box throughout the close.
    ring_c = np.array([c[0] + hx + 0.0119, c[1] - 0.011, top + 0.0061])

    targets_base = {
        "thumb": thumb_c,
        "index": index_c,
        "middle": middle_c,
        "ring": ring_c,
        "pinky": pinky_c,
    }
    identity = (0.0, 0.0, 0.0, 1.0)
    return {
        name: Pose(position=world_from_base(scene, p), orientation=identity)
        for name, p in targets_base.items()
    }
