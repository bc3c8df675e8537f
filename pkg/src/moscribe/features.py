"""263-channel per-frame motion features and their inverse mapping.

Channel blocks, in order:

    root_angular_velocity   1    yaw change to the next frame (rad/frame)
    root_linear_velocity    2    root XZ velocity in the facing frame (m/frame)
    root_height             1    root Y (m)
    joint_positions        63    21 non-root joints, root-relative, facing frame
    joint_rotations_6d    126    21 local rotations, first two matrix columns
    joint_velocities       66    22 joint velocities in the facing frame (m/frame)
    foot_contacts           4    left ankle, left foot, right ankle, right foot

Velocities are finite differences toward the next frame; the last frame
repeats the previous difference so sequence length is unchanged. A foot
contact is 1 when the joint moves slower than the speed threshold and sits
below the height threshold, else 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .motion import MotionError, MotionSequence, PoseFrame, is_canonical, pose_yaw
from .rotations import (
    cont6d_to_quat,
    quat_about_y,
    quat_rotate,
    quat_to_cont6d,
    matrix_to_quat,
    quat_mul,
    wrap_angle,
)
from .skeleton import Skeleton, forward_kinematics

FEATURE_DIM = 263
EVAL_FPS = 20.0

CONTACT_SPEED_THRESHOLD = 0.002  # m/frame
CONTACT_HEIGHT_THRESHOLD = 0.05  # m

CONTACT_JOINTS = ("left_ankle", "left_foot", "right_ankle", "right_foot")

FEATURE_LAYOUT = (
    ("root_angular_velocity", 0, 1),
    ("root_linear_velocity", 1, 2),
    ("root_height", 3, 1),
    ("joint_positions", 4, 63),
    ("joint_rotations_6d", 67, 126),
    ("joint_velocities", 193, 66),
    ("foot_contacts", 259, 4),
)


def layout_slice(name):
    for block, start, size in FEATURE_LAYOUT:
        if block == name:
            return slice(start, start + size)
    raise KeyError(name)


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """A (T, 263) feature matrix at the evaluation frame rate."""

    data: np.ndarray
    fps: float = EVAL_FPS
    layout: tuple = FEATURE_LAYOUT

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[1] != FEATURE_DIM:
            raise MotionError(f"feature frames must have {FEATURE_DIM} components")
        contacts = data[:, layout_slice("foot_contacts")]
        if contacts.size and (contacts.min() < 0.0 or contacts.max() > 1.0):
            raise MotionError("foot-contact channels must lie in [0, 1]")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __len__(self):
        return self.data.shape[0]


def _facing_yaws(motion, skeleton, positions):
    return np.array(
        [pose_yaw(f, skeleton, positions[i]) for i, f in enumerate(motion.frames)]
    )


def _repeat_last(deltas):
    """Extend per-step finite differences to per-frame by repeating the last one."""
    return np.concatenate([deltas, deltas[-1:]], axis=0)


def encode_features(motion: MotionSequence, skeleton: Skeleton) -> FeatureSequence:
    """Encode a canonical 20-fps motion into the 263-channel representation."""
    if abs(motion.fps - EVAL_FPS) > 1e-9:
        raise MotionError(f"feature encoding requires {EVAL_FPS:g} fps input")
    if not is_canonical(motion, skeleton):
        raise MotionError("feature encoding requires a canonicalized motion")
    T = len(motion.frames)
    positions = np.stack([forward_kinematics(f, skeleton) for f in motion.frames])
    yaws = _facing_yaws(motion, skeleton, positions)
    inverse_facing = [quat_about_y(-yaw) for yaw in yaws]

    data = np.zeros((T, FEATURE_DIM))

    if T > 1:
        data[:, 0] = _repeat_last(wrap_angle(np.diff(yaws)))

    roots = positions[:, 0]
    root_vel = _repeat_last(np.diff(roots, axis=0)) if T > 1 else np.zeros((1, 3))
    for i in range(T):
        local = quat_rotate(inverse_facing[i], root_vel[i])
        data[i, 1] = local[0]
        data[i, 2] = local[2]
    data[:, 3] = roots[:, 1]

    for i, frame in enumerate(motion.frames):
        rel = positions[i, 1:] - roots[i]
        data[i, 4:67] = quat_rotate(inverse_facing[i], rel).reshape(-1)
        data[i, 67:193] = np.concatenate(
            [quat_to_cont6d(q) for q in frame.joint_rotations]
        )

    joint_deltas = np.diff(positions, axis=0) if T > 1 else np.zeros((0, 22, 3))
    joint_vel = _repeat_last(joint_deltas) if T > 1 else np.zeros((1, 22, 3))
    for i in range(T):
        data[i, 193:259] = quat_rotate(inverse_facing[i], joint_vel[i]).reshape(-1)

    speeds = np.linalg.norm(joint_vel, axis=2)
    for c, name in enumerate(CONTACT_JOINTS):
        j = skeleton.index(name)
        contact = (speeds[:, j] < CONTACT_SPEED_THRESHOLD) & (
            positions[:, j, 1] < CONTACT_HEIGHT_THRESHOLD
        )
        data[:, 259 + c] = contact.astype(np.float64)

    return FeatureSequence(data)


def decode_features(features: FeatureSequence, skeleton: Skeleton, id="decoded") -> MotionSequence:
    """Rebuild a motion from features.

    The root trajectory integrates the angular/linear velocity channels;
    joint rotations come from the 6D block; the root orientation combines
    the integrated yaw with the tilt that best maps the root children's
    offsets onto the decoded positions.
    """
    data = features.data
    T = data.shape[0]
    root_children = [j for j in range(1, skeleton.num_joints) if skeleton.parent_index[j] == 0]
    offsets = skeleton.offsets[root_children]

    yaws = np.zeros(T)
    for i in range(T - 1):
        yaws[i + 1] = yaws[i] + data[i, 0]

    roots = np.zeros((T, 3))
    roots[:, 1] = data[:, 3]
    for i in range(T - 1):
        step = quat_rotate(quat_about_y(yaws[i]), np.array([data[i, 1], 0.0, data[i, 2]]))
        roots[i + 1, 0] = roots[i, 0] + step[0]
        roots[i + 1, 2] = roots[i, 2] + step[2]

    frames = []
    for i in range(T):
        rel = data[i, 4:67].reshape(21, 3)
        tilt = _fit_rotation(offsets, rel[[j - 1 for j in root_children]])
        root_quat = quat_mul(quat_about_y(yaws[i]), tilt)
        joint_quats = np.stack(
            [cont6d_to_quat(data[i, 67 + 6 * j : 73 + 6 * j]) for j in range(21)]
        )
        frames.append(PoseFrame(roots[i], root_quat, joint_quats))
    return MotionSequence(id, float(features.fps), frames)


def _fit_rotation(source, target):
    """Least-squares proper rotation mapping source points onto target (Kabsch)."""
    h = source.T @ target
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    return matrix_to_quat(vt.T @ np.diag([1.0, 1.0, d]) @ u.T)


def decoded_positions(features: FeatureSequence, skeleton: Skeleton):
    """Global joint positions (T, 22, 3) straight from the feature channels."""
    data = features.data
    T = data.shape[0]
    yaws = np.zeros(T)
    for i in range(T - 1):
        yaws[i + 1] = yaws[i] + data[i, 0]
    roots = np.zeros((T, 3))
    roots[:, 1] = data[:, 3]
    for i in range(T - 1):
        step = quat_rotate(quat_about_y(yaws[i]), np.array([data[i, 1], 0.0, data[i, 2]]))
        roots[i + 1, 0] = roots[i, 0] + step[0]
        roots[i + 1, 2] = roots[i, 2] + step[2]
    out = np.zeros((T, 22, 3))
    out[:, 0] = roots
    for i in range(T):
        rel = data[i, 4:67].reshape(21, 3)
        out[i, 1:] = quat_rotate(quat_about_y(yaws[i]), rel) + roots[i]
    return out
