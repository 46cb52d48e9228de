"""Robot description parsing for the five-finger hand.

Reads a URDF-style XML subset (links with optional box / capsule / sphere
collision geometry, revolute and fixed joints with origin / axis / limit /
dynamics tags) into an immutable kinematic tree.  Visual, inertial and
material elements are ignored; anything else unrecognized is an error.

Finger grouping is inferred from joint names: every movable joint named
``<finger>_<something>`` belongs to finger ``<finger>``.  When a finger
named "thumb" exists the hand-layout rule is enforced: the thumb has
exactly 5 movable joints and every other canonical finger (index, middle,
ring, pinky) has exactly 4.

Fixed joints stay in the tree as zero-DOF constant transforms; forward
kinematics folds them into the pose walk, so a fingertip frame attached by
a fixed joint costs nothing at runtime.
"""

from __future__ import annotations

import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .transforms import Transform

CANONICAL_FINGERS = ("thumb", "index", "middle", "ring", "pinky")
THUMB_DOF = 5
OTHER_FINGER_DOF = 4


class RobotDescriptionError(ValueError):
    """The description text itself is malformed (XML or required fields)."""


class ValidationError(ValueError):
    """The description parsed but violates a kinematic-tree invariant."""


class UnknownFingerError(KeyError):
    """Requested finger name does not exist on this chain."""


# --------------------------------------------------------------------------
# geometry variants (collision only; all dimensions in meters)


@dataclass(frozen=True)
class BoxGeometry:
    half_extents: tuple[float, float, float]


@dataclass(frozen=True)
class CapsuleGeometry:
    """Cylinder of `length` along local +Z capped by hemispheres of `radius`."""
    radius: float
    length: float


@dataclass(frozen=True)
class SphereGeometry:
    radius: float


Geometry = Union[BoxGeometry, CapsuleGeometry, SphereGeometry]


@dataclass(frozen=True)
class LinkSpec:
    name: str
    geometry: Optional[Geometry] = None
    geometry_origin: Transform = Transform()


@dataclass(frozen=True)
class JointSpec:
    name: str
    kind: str  # "revolute" or "fixed"
    parent: int  # link index
    child: int  # link index
    origin: Transform
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    lower_limit: float = 0.0
    upper_limit: float = 0.0
    damping: float = 0.0


@dataclass(frozen=True)
class Finger:
    """One finger: its movable joints base-to-tip and its end-effector link."""
    joints: tuple[int, ...]
    end_effector: int


@dataclass
class KinematicChain:
    """Immutable kinematic tree. Treat as read-only after construction."""

    links: tuple[LinkSpec, ...]
    joints: tuple[JointSpec, ...]
    root: int
    movable: tuple[int, ...]  # joint indices, tree order
    fingers: dict[str, Finger]
    # derived lookups, excluded from equality
    link_index: dict[str, int] = field(default_factory=dict, compare=False, repr=False)
    joint_index: dict[str, int] = field(default_factory=dict, compare=False, repr=False)
    parent_joint: dict[int, int] = field(default_factory=dict, compare=False, repr=False)
    path_to_link: dict[int, tuple[int, ...]] = field(default_factory=dict, compare=False, repr=False)
    finger_links: dict[str, tuple[int, ...]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self.link_index = {l.name: i for i, l in enumerate(self.links)}
        self.joint_index = {j.name: i for i, j in enumerate(self.joints)}
        self.parent_joint = {j.child: i for i, j in enumerate(self.joints)}
        for li in range(len(self.links)):
            path = []
            cur = li
            while cur in self.parent_joint:
                ji = self.parent_joint[cur]
                path.append(ji)
                cur = self.joints[ji].parent
            self.path_to_link[li] = tuple(reversed(path))
        for name, finger in self.fingers.items():
            base_link = self.joints[finger.joints[0]].child
            members = [li for li in range(len(self.links))
                       if base_link in {self.joints[j].child for j in self.path_to_link[li]}]
            self.finger_links[name] = tuple(sorted(members, key=lambda li: len(self.path_to_link[li])))

    def finger(self, name: str) -> Finger:
        try:
            return self.fingers[name]
        except KeyError:
            raise UnknownFingerError(name) from None

    def finger_of_joint(self, joint: int) -> Optional[str]:
        for name, f in self.fingers.items():
            if joint in f.joints:
                return name
        return None


# --------------------------------------------------------------------------
# parsing


def _parse_vec3(text: Optional[str], default=(0.0, 0.0, 0.0), what: str = "vector") -> tuple[float, float, float]:
    if text is None:
        return tuple(float(v) for v in default)
    parts = text.split()
    if len(parts) != 3:
        raise RobotDescriptionError(f"{what}: expected 3 numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise RobotDescriptionError(f"{what}: {exc}") from None


def _parse_origin(elem: Optional[ET.Element], where: str) -> Transform:
    if elem is None:
        return Transform()
    xyz = _parse_vec3(elem.get("xyz"), what=f"{where} origin xyz")
    rpy = _parse_vec3(elem.get("rpy"), what=f"{where} origin rpy")
    return Transform(xyz=xyz, rpy=rpy)


def _parse_geometry(geom: ET.Element, where: str) -> Geometry:
    shapes = [c for c in geom]
    if len(shapes) != 1:
        raise RobotDescriptionError(f"{where}: geometry must hold exactly one shape")
    shape = shapes[0]
    if shape.tag == "box":
        size = _parse_vec3(shape.get("size"), what=f"{where} box size")
        if any(s <= 0.0 for s in size):
            raise RobotDescriptionError(f"{where}: box size must be positive, got {size}")
        return BoxGeometry(half_extents=tuple(s / 2.0 for s in size))
    if shape.tag == "sphere":
        radius = float(shape.get("radius", "nan"))
        if not radius > 0.0:
            raise RobotDescriptionError(f"{where}: sphere radius must be positive")
        return SphereGeometry(radius=radius)
    if shape.tag == "capsule":
        radius = float(shape.get("radius", "nan"))
        length = float(shape.get("length", "nan"))
        if not radius > 0.0 or not length >= 0.0:
            raise RobotDescriptionError(f"{where}: capsule needs radius > 0 and length >= 0")
        return CapsuleGeometry(radius=radius, length=length)
    raise RobotDescriptionError(f"{where}: unsupported geometry <{shape.tag}>")


_IGNORED_LINK_CHILDREN = {"visual", "inertial", "contact"}
_IGNORED_JOINT_CHILDREN = {"calibration", "mimic", "safety_controller"}


def parse_robot_description(text: str) -> KinematicChain:
    """Parse URDF-subset XML text into a KinematicChain.

    Raises RobotDescriptionError for malformed text and ValidationError for
    well-formed text that breaks a structural invariant (cycles, multiple
    roots, missing revolute limits, bad finger layout).
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise RobotDescriptionError(f"XML parse failure at line {exc.position[0]}: {exc.msg}") from None
    if root.tag != "robot":
        raise RobotDescriptionError(f"top-level element must be <robot>, got <{root.tag}>")

    links: list[LinkSpec] = []
    link_idx: dict[str, int] = {}
    joint_elems: list[ET.Element] = []
    for child in root:
        if child.tag == "link":
            name = child.get("name")
            if not name:
                raise RobotDescriptionError("<link> missing name attribute")
            if name in link_idx:
                raise RobotDescriptionError(f"duplicate link name {name!r}")
            geometry = None
            geometry_origin = Transform()
            collision = child.find("collision")
            if collision is not None:
                geom = collision.find("geometry")
                if geom is None:
                    raise RobotDescriptionError(f"link {name!r}: <collision> without <geometry>")
                geometry = _parse_geometry(geom, f"link {name!r}")
                geometry_origin = _parse_origin(collision.find("origin"), f"link {name!r} collision")
            for sub in child:
                if sub.tag not in _IGNORED_LINK_CHILDREN and sub.tag != "collision":
                    raise RobotDescriptionError(f"link {name!r}: unsupported element <{sub.tag}>")
            link_idx[name] = len(links)
            links.append(LinkSpec(name=name, geometry=geometry, geometry_origin=geometry_origin))
        elif child.tag == "joint":
            joint_elems.append(child)
        elif child.tag in ("material", "gazebo"):
            continue
        else:
            raise RobotDescriptionError(f"unsupported top-level element <{child.tag}>")

    joints: list[JointSpec] = []
    joint_names: set[str] = set()
    for elem in joint_elems:
        name = elem.get("name")
        kind = elem.get("type")
        if not name:
            raise RobotDescriptionError("<joint> missing name attribute")
        if name in joint_names:
            raise RobotDescriptionError(f"duplicate joint name {name!r}")
        joint_names.add(name)
        if kind not in ("revolute", "fixed"):
            raise RobotDescriptionError(f"joint {name!r}: unsupported type {kind!r}")
        parent_el = elem.find("parent")
        child_el = elem.find("child")
        if parent_el is None or child_el is None:
            raise RobotDescriptionError(f"joint {name!r}: needs <parent> and <child>")
        try:
            parent = link_idx[parent_el.get("link")]
            child_link = link_idx[child_el.get("link")]
        except KeyError as exc:
            raise RobotDescriptionError(f"joint {name!r}: unknown link {exc.args[0]!r}") from None
        origin = _parse_origin(elem.find("origin"), f"joint {name!r}")
        damping = 0.0
        dyn = elem.find("dynamics")
        if dyn is not None:
            damping = float(dyn.get("damping", "0"))
        if kind == "fixed":
            joints.append(JointSpec(name=name, kind=kind, parent=parent, child=child_link,
                                    origin=origin, damping=damping))
            continue
        axis_el = elem.find("axis")
        axis = np.array(_parse_vec3(axis_el.get("xyz") if axis_el is not None else None,
                                    default=(0.0, 0.0, 1.0), what=f"joint {name!r} axis"))
        norm = float(np.linalg.norm(axis))
        if norm < 1e-9:
            raise RobotDescriptionError(f"joint {name!r}: axis must be nonzero")
        axis = axis / norm
        limit_el = elem.find("limit")
        if limit_el is None or limit_el.get("lower") is None or limit_el.get("upper") is None:
            raise ValidationError(f"revolute joint {name!r} is missing lower/upper limits")
        lower, upper = float(limit_el.get("lower")), float(limit_el.get("upper"))
        if lower > upper:
            raise ValidationError(f"joint {name!r}: lower limit exceeds upper limit")
        joints.append(JointSpec(name=name, kind=kind, parent=parent, child=child_link,
                                origin=origin, axis=tuple(float(a) for a in axis),
                                lower_limit=lower, upper_limit=upper, damping=damping))

    return _build_chain(tuple(links), tuple(joints))


def _build_chain(links: tuple[LinkSpec, ...], joints: tuple[JointSpec, ...]) -> KinematicChain:
    if not links:
        raise ValidationError("description has no links")
    parent_of: dict[int, int] = {}
    for ji, j in enumerate(joints):
        if j.child in parent_of:
            raise ValidationError(f"link {links[j.child].name!r} has multiple parent joints")
        parent_of[j.child] = ji
    roots = [li for li in range(len(links)) if li not in parent_of]
    if len(roots) != 1:
        names = [links[li].name for li in roots]
        raise ValidationError(f"expected a single root link, found {names or 'none (cycle)'}")
    root = roots[0]
    # cycle / reachability check: every link must walk up to the root
    for li in range(len(links)):
        seen = set()
        cur = li
        while cur in parent_of:
            if cur in seen:
                raise ValidationError(f"cycle detected at link {links[cur].name!r}")
            seen.add(cur)
            cur = joints[parent_of[cur]].parent
        if cur != root:
            raise ValidationError(f"link {links[li].name!r} is not connected to the root")

    movable = tuple(ji for ji, j in enumerate(joints) if j.kind == "revolute")

    # depth of each joint (movable count above it) for base-to-tip ordering
    def depth_of(ji: int) -> int:
        d = 0
        cur = joints[ji].parent
        while cur in parent_of:
            d += 1
            cur = joints[parent_of[cur]].parent
        return d

    groups: dict[str, list[int]] = {}
    for ji in movable:
        finger_name = joints[ji].name.split("_", 1)[0]
        groups.setdefault(finger_name, []).append(ji)

    children_joints: dict[int, list[int]] = {}
    for ji, j in enumerate(joints):
        children_joints.setdefault(j.parent, []).append(ji)

    fingers: dict[str, Finger] = {}
    for name, members in groups.items():
        members.sort(key=depth_of)
        # consecutive joints must chain: each one's parent link reachable from
        # the previous child link through fixed joints only
        for a, b in zip(members, members[1:]):
            cur = joints[b].parent
            ok = False
            while True:
                if cur == joints[a].child:
                    ok = True
                    break
                ji = parent_of.get(cur)
                if ji is None or joints[ji].kind != "fixed":
                    break
                cur = joints[ji].parent
            if not ok:
                raise ValidationError(f"finger {name!r}: joints do not form a single serial chain")
        # end effector: walk down from the last joint's child through
        # single-child links to the leaf
        ee = joints[members[-1]].child
        while True:
            below = children_joints.get(ee, [])
            if not below:
                break
            if len(below) > 1:
                raise ValidationError(f"finger {name!r}: branches below its last joint")
            ee = joints[below[0]].child
        fingers[name] = Finger(joints=tuple(members), end_effector=ee)

    if "thumb" in fingers:
        if len(fingers["thumb"].joints) != THUMB_DOF:
            raise ValidationError(
                f"thumb must have {THUMB_DOF} movable joints, found {len(fingers['thumb'].joints)}")
        for name in fingers:
            if name != "thumb" and len(fingers[name].joints) != OTHER_FINGER_DOF:
                raise ValidationError(
                    f"finger {name!r} must have {OTHER_FINGER_DOF} movable joints, "
                    f"found {len(fingers[name].joints)}")

    return KinematicChain(links=links, joints=joints, root=root, movable=movable, fingers=fingers)


# --------------------------------------------------------------------------
# serialization (inverse of parse; floats via repr for exact round trips)


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def serialize_robot_description(chain: KinematicChain) -> str:
    out = ['<robot name="robot">']
    for link in chain.links:
        if link.geometry is None:
            out.append(f'  <link name="{link.name}"/>')
            continue
        out.append(f'  <link name="{link.name}">')
        out.append('    <collision>')
        og = link.geometry_origin
        out.append(f'      <origin xyz="{_fmt(og.xyz)}" rpy="{_fmt(og.rpy)}"/>')
        g = link.geometry
        if isinstance(g, BoxGeometry):
            size = tuple(2.0 * h for h in g.half_extents)
            shape = f'<box size="{_fmt(size)}"/>'
        elif isinstance(g, SphereGeometry):
            shape = f'<sphere radius="{repr(float(g.radius))}"/>'
        else:
            shape = f'<capsule radius="{repr(float(g.radius))}" length="{repr(float(g.length))}"/>'
        out.append(f'      <geometry>{shape}</geometry>')
        out.append('    </collision>')
        out.append('  </link>')
    for j in chain.joints:
        out.append(f'  <joint name="{j.name}" type="{j.kind}">')
        out.append(f'    <parent link="{chain.links[j.parent].name}"/>')
        out.append(f'    <child link="{chain.links[j.child].name}"/>')
        out.append(f'    <origin xyz="{_fmt(j.origin.xyz)}" rpy="{_fmt(j.origin.rpy)}"/>')
        if j.kind == "revolute":
            out.append(f'    <axis xyz="{_fmt(j.axis)}"/>')
            out.append(f'    <limit lower="{repr(float(j.lower_limit))}" upper="{repr(float(j.upper_limit))}"/>')
        if j.damping != 0.0:
            out.append(f'    <dynamics damping="{repr(float(j.damping))}"/>')
        out.append('  </joint>')
    out.append('</robot>')
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# convenience accessors


def finger_joint_limits(chain: KinematicChain, finger: str) -> list[tuple[float, float]]:
    """(lower, upper) per movable joint of `finger`, base-to-tip order."""
    f = chain.finger(finger)
    return [(chain.joints[ji].lower_limit, chain.joints[ji].upper_limit) for ji in f.joints]


def load_robot_description(path: str) -> KinematicChain:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_robot_description(fh.read())


def bundled_data_dir() -> str:
    """Directory holding packaged assets; override with GRASPFORGE_DATA_DIR."""
    override = os.environ.get("GRASPFORGE_DATA_DIR")
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "data")


def bundled_hand_path() -> str:
    return os.path.join(bundled_data_dir(), "hand.urdf")
