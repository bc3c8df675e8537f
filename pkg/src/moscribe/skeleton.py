"""Skeletal template, validation, forward kinematics, and mirroring."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rotations import quat_mul, quat_rotate

JOINT_NAMES = [
    "pelvis",
    "left_hip",
    "right_hip",
    "spine1",
    "left_knee",
    "right_knee",
    "spine2",
    "left_ankle",
    "right_ankle",
    "spine3",
    "left_foot",
    "right_foot",
    "neck",
    "left_collar",
    "right_collar",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
]

PARENT_INDEX = [-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19]

# Bone vectors (meters) in the parent frame. Identity rotations give a
# T-pose: arms along +/-X, legs straight down, toes pointing +Z. With the
# root at height 0.96 the feet rest on the floor and both contact joints
# (ankle, foot) sit below the 0.05 m contact-height threshold.
DEFAULT_OFFSETS = np.array(
    [
        [0.00, 0.00, 0.00],  # pelvis
        [0.10, -0.06, 0.00],  # left_hip
        [-0.10, -0.06, 0.00],  # right_hip
        [0.00, 0.12, 0.00],  # spine1
        [0.00, -0.42, 0.00],  # left_knee
        [0.00, -0.42, 0.00],  # right_knee
        [0.00, 0.14, 0.00],  # spine2
        [0.00, -0.44, 0.00],  # left_ankle
        [0.00, -0.44, 0.00],  # right_ankle
        [0.00, 0.14, 0.00],  # spine3
        [0.00, -0.04, 0.13],  # left_foot
        [0.00, -0.04, 0.13],  # right_foot
        [0.00, 0.16, 0.00],  # neck
        [0.06, 0.10, 0.00],  # left_collar
        [-0.06, 0.10, 0.00],  # right_collar
        [0.00, 0.12, 0.00],  # head
        [0.12, 0.00, 0.00],  # left_shoulder
        [-0.12, 0.00, 0.00],  # right_shoulder
        [0.26, 0.00, 0.00],  # left_elbow
        [-0.26, 0.00, 0.00],  # right_elbow
        [0.25, 0.00, 0.00],  # left_wrist
        [-0.25, 0.00, 0.00],  # right_wrist
    ]
)

# Root height (m) at which the default-template identity pose touches the floor.
DEFAULT_ROOT_HEIGHT = 0.96


class SkeletonError(ValueError):
    pass


@dataclass(frozen=True)
class Skeleton:
    """A 22-joint kinematic tree with fixed bone offsets."""

    joint_names: tuple = tuple(JOINT_NAMES)
    parent_index: tuple = tuple(PARENT_INDEX)
    offsets: np.ndarray = field(default_factory=lambda: DEFAULT_OFFSETS.copy())

    def __post_init__(self):
        object.__setattr__(self, "joint_names", tuple(self.joint_names))
        object.__setattr__(self, "parent_index", tuple(self.parent_index))
        offsets = np.asarray(self.offsets, dtype=np.float64)
        offsets.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        self._validate()

    def _validate(self):
        n = len(self.joint_names)
        if len(self.parent_index) != n or self.offsets.shape != (n, 3):
            raise SkeletonError("joint_names, parent_index, and offsets must agree in length")
        roots = [i for i, p in enumerate(self.parent_index) if p < 0]
        if roots != [0]:
            raise SkeletonError("skeleton must have exactly one root at joint 0")
        for i, p in enumerate(self.parent_index[1:], start=1):
            if not 0 <= p < i:
                raise SkeletonError(f"joint {i} must have a parent with a smaller index")
        if not np.all(np.isfinite(self.offsets)):
            raise SkeletonError("offsets must be finite")
        lengths = np.linalg.norm(self.offsets[1:], axis=1)
        if np.any(lengths <= 0.0):
            raise SkeletonError("non-root bone offsets must have positive length")

    @property
    def num_joints(self):
        return len(self.joint_names)

    def index(self, name):
        return self.joint_names.index(name)

    def bone_lengths(self):
        return np.linalg.norm(self.offsets, axis=1)

    def mirror_map(self):
        """Per-joint index of the left/right mirrored joint (self for midline joints)."""
        mapping = []
        for name in self.joint_names:
            if name.startswith("left_"):
                mapping.append(self.index("right_" + name[5:]))
            elif name.startswith("right_"):
                mapping.append(self.index("left_" + name[6:]))
            else:
                mapping.append(self.index(name))
        return mapping


def forward_kinematics(pose, skeleton: Skeleton):
    """Global joint positions (J, 3) of a pose on a skeleton.

    Each child sits at parent position + parent global rotation applied to
    its offset.
    """
    n = skeleton.num_joints
    positions = np.empty((n, 3))
    global_quats = np.empty((n, 4))
    positions[0] = pose.root_position
    global_quats[0] = pose.root_orientation
    for j in range(1, n):
        p = skeleton.parent_index[j]
        positions[j] = positions[p] + quat_rotate(global_quats[p], skeleton.offsets[j])
        global_quats[j] = quat_mul(global_quats[p], pose.joint_rotations[j - 1])
    return positions


def global_rotations(pose, skeleton: Skeleton):
    """Global joint rotations (J, 4) accumulated down the tree."""
    n = skeleton.num_joints
    quats = np.empty((n, 4))
    quats[0] = pose.root_orientation
    for j in range(1, n):
        quats[j] = quat_mul(quats[skeleton.parent_index[j]], pose.joint_rotations[j - 1])
    return quats


def _mirror_quat(q):
    # Conjugation by the x -> -x reflection.
    return q * np.array([1.0, 1.0, -1.0, -1.0])


def mirror_pose(pose, skeleton: Skeleton):
    """Left/right mirror of a pose across the YZ plane.

    Swaps the rotations of paired joints and reflects every rotation and
    the root translation, so FK of the result is the FK of the input with
    x negated and left/right joints exchanged.
    """
    from .motion import PoseFrame

    mapping = skeleton.mirror_map()
    root_position = pose.root_position * np.array([-1.0, 1.0, 1.0])
    root_orientation = _mirror_quat(pose.root_orientation)
    joint_rotations = np.empty_like(pose.joint_rotations)
    for j in range(1, skeleton.num_joints):
        joint_rotations[j - 1] = _mirror_quat(pose.joint_rotations[mapping[j] - 1])
    return PoseFrame(root_position, root_orientation, joint_rotations)
