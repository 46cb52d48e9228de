"""Analytic contact detection between finger geometry and the box object.

Finger links carry sphere or capsule collision shapes; the object is an
oriented box.  Each (finger link, box) pair contributes at most one contact:
the deepest penetrating point of the link surface.  Forces follow the
quasi-static spring law F = k * depth with the object's contact stiffness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import JointState, link_transform
from .robot_model import CapsuleGeometry, SphereGeometry
from .scene import Scene, SceneObject

# Fixed-iteration ternary search keeps results bitwise deterministic while
# shrinking the bracket below 1e-12 m (box SDF is convex along a segment).
_SEGMENT_SEARCH_STEPS = 96


@dataclass(frozen=True)
class ContactPoint:
    finger: str
    link: int
    position: np.ndarray  # on the object surface
    normal: np.ndarray  # unit, object-outward
    penetration_depth: float
    normal_force: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float).reshape(3))


def _closest_point_local(p: np.ndarray, half: np.ndarray):
    """Closest surface point / outward normal / signed distance, box frame."""
    q = np.clip(p, -half, half)
    if np.any(np.abs(p) > half):  # outside: clamp projects onto the surface
        offset = p - q
        dist = float(np.linalg.norm(offset))
        return q, offset / dist, dist
    # inside: push out through the nearest face, ties broken by axis order
    gaps = half - np.abs(p)
    axis = int(np.argmin(gaps))
    normal = np.zeros(3)
    normal[axis] = 1.0 if p[axis] >= 0.0 else -1.0
    surface = p.copy()
    surface[axis] = half[axis] * normal[axis]
    return surface, normal, -float(gaps[axis])


def closest_point_box(point, box: SceneObject):
    """Exact closest point on an oriented box.

    Returns (surface point, outward normal, signed distance); the distance is
    negative for points inside the box.  Face regions yield the face normal,
    edge/corner regions the normalized offset, interior points the nearest
    face normal with ties broken in x, y, z order.
    """
    R = box.pose.rotation()
    c = box.pose.position
    p_local = R.T @ (np.asarray(point, dtype=float) - c)
    q_local, n_local, sd = _closest_point_local(p_local, np.asarray(box.half_extents))
    return R @ q_local + c, R @ n_local, sd


def _deepest_on_segment(a: np.ndarray, b: np.ndarray, box: SceneObject) -> np.ndarray:
    """Point of minimum box signed distance on segment ab (convex in t)."""
    R = box.pose.rotation()
    c = box.pose.position
    half = np.asarray(box.half_extents)
    a_l = R.T @ (a - c)
    b_l = R.T @ (b - c)

    def sd(t: float) -> float:
        return _closest_point_local(a_l + t * (b_l - a_l), half)[2]

    lo, hi = 0.0, 1.0
    for _ in range(_SEGMENT_SEARCH_STEPS):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if sd(m1) <= sd(m2):
            hi = m2
        else:
            lo = m1
    t = 0.5 * (lo + hi)
    return a + t * (b - a)


def _link_probe(scene: Scene, state: JointState, link: int):
    """(deepest probe point in world, shape radius) or None for bare links."""
    link_spec = scene.chain.links[link]
    geom = link_spec.geometry
    if geom is None:
        return None
    R, t = link_transform(scene.chain, state, link)
    R_w = scene.hand_base.rotation() @ R
    t_w = scene.hand_base.rotation() @ t + scene.hand_base.position
    og = link_spec.geometry_origin
    center = R_w @ og.translation() + t_w
    if isinstance(geom, SphereGeometry):
        return center, geom.radius
    if isinstance(geom, CapsuleGeometry):
        axis_w = R_w @ og.rotation() @ np.array([0.0, 0.0, 1.0])
        a = center - 0.5 * geom.length * axis_w
        b = center + 0.5 * geom.length * axis_w
        return _deepest_on_segment(a, b, scene.object), geom.radius
    return None  # boxes on finger links have no contact model


def detect_contacts(scene: Scene, state: JointState) -> list[ContactPoint]:
    """One contact per penetrating (finger link, box) pair.

    A link touches when its shape surface reaches the box: signed distance of
    the deepest probe point minus the shape radius is <= 0.  Output order is
    deterministic: fingers in chain order, links base-to-tip within a finger.
    No force threshold is applied here; validation filters weak contacts.
    """
    k = scene.object.params.contact_stiffness
    contacts: list[ContactPoint] = []
    for finger, links in scene.chain.finger_links.items():
        for link in links:
            probe = _link_probe(scene, state, link)
            if probe is None:
                continue
            point, radius = probe
            surface, normal, sd = closest_point_box(point, scene.object)
            depth = radius - sd
            if depth < 0.0:
                continue
            contacts.append(ContactPoint(
                finger=finger,
                link=link,
                position=surface,
                normal=normal,
                penetration_depth=float(depth),
                normal_force=float(k * depth),
            ))
    return contacts
