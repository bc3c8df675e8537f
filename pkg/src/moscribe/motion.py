"""Motion sequences: validation, canonicalization, resampling, cropping.

A canonical motion starts at the XZ origin facing +Z, with its lowest joint
touching the floor (height 0) somewhere in the sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rotations import UP, quat_about_y, quat_mul, quat_rotate, slerp, wrap_angle, yaw_of_direction
from .skeleton import Skeleton, forward_kinematics

QUAT_NORM_TOL = 1e-6
CANONICAL_TOL = 1e-4
# Corrections below this size are skipped so canonicalization is an exact
# fixed point (re-running it cannot chase accumulated rounding noise).
SNAP_TOL = 1e-12


class MotionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PoseFrame:
    """One skeletal pose: root transform plus 21 local joint rotations."""

    root_position: np.ndarray
    root_orientation: np.ndarray
    joint_rotations: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "root_position", _frozen(self.root_position, (3,)))
        object.__setattr__(self, "root_orientation", _frozen(self.root_orientation, (4,)))
        object.__setattr__(self, "joint_rotations", _frozen(self.joint_rotations, (21, 4)))

    def validate(self):
        for arr in (self.root_position, self.root_orientation, self.joint_rotations):
            if not np.all(np.isfinite(arr)):
                raise MotionError("pose contains non-finite values")
        quats = np.vstack([self.root_orientation[None, :], self.joint_rotations])
        norms = np.linalg.norm(quats, axis=1)
        if np.any(np.abs(norms - 1.0) > QUAT_NORM_TOL):
            raise MotionError("pose quaternions must be unit norm")

    @staticmethod
    def rest(root_position=(0.0, 0.0, 0.0)):
        return PoseFrame(
            np.asarray(root_position, dtype=np.float64),
            np.array([1.0, 0.0, 0.0, 0.0]),
            np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (21, 1)),
        )


def _frozen(arr, shape):
    arr = np.array(arr, dtype=np.float64)
    if arr.shape != shape:
        raise MotionError(f"expected array of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


def poses_equal(a: PoseFrame, b: PoseFrame, tol=0.0):
    arrays = (
        (a.root_position, b.root_position),
        (a.root_orientation, b.root_orientation),
        (a.joint_rotations, b.joint_rotations),
    )
    if tol == 0.0:
        return all(np.array_equal(x, y) for x, y in arrays)
    return all(np.allclose(x, y, atol=tol, rtol=0.0) for x, y in arrays)


def motions_equal(a: "MotionSequence", b: "MotionSequence", tol=0.0):
    return (
        a.fps == b.fps
        and len(a.frames) == len(b.frames)
        and all(poses_equal(x, y, tol) for x, y in zip(a.frames, b.frames))
    )


@dataclass(frozen=True, eq=False)
class MotionSequence:
    """An ordered sequence of poses at a fixed frame rate."""

    id: str
    fps: float
    frames: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if self.fps <= 0.0 or not np.isfinite(self.fps):
            raise MotionError("fps must be positive")
        if not self.frames:
            raise MotionError("motion must contain at least one frame")

    def validate(self):
        for frame in self.frames:
            frame.validate()

    def __len__(self):
        return len(self.frames)

    @property
    def duration_s(self):
        return (len(self.frames) - 1) / self.fps

    def with_frames(self, frames, id=None, fps=None):
        return MotionSequence(self.id if id is None else id, self.fps if fps is None else fps, frames)


def pose_facing(pose, skeleton: Skeleton, positions=None):
    """Horizontal facing direction: (left hip - right hip) x vertical."""
    if positions is None:
        positions = forward_kinematics(pose, skeleton)
    across = positions[skeleton.index("left_hip")] - positions[skeleton.index("right_hip")]
    facing = np.cross(across, UP)
    norm = np.linalg.norm(facing)
    if norm < 1e-9:
        raise MotionError("degenerate orientation")
    return facing / norm


def pose_yaw(pose, skeleton: Skeleton, positions=None):
    """Heading angle of the facing direction (0 at +Z, positive toward the left)."""
    return yaw_of_direction(pose_facing(pose, skeleton, positions))


def transform_pose(pose, rotation_quat, translation):
    """Rigidly rotate a pose about the world origin and then translate it."""
    return PoseFrame(
        quat_rotate(rotation_quat, pose.root_position) + np.asarray(translation, dtype=np.float64),
        quat_mul(rotation_quat, pose.root_orientation),
        pose.joint_rotations,
    )


def canonicalize(motion: MotionSequence, skeleton: Skeleton) -> MotionSequence:
    """Root the first frame at the XZ origin, face it +Z, and rest on the floor.

    A rigid transform, so inter-joint distances are preserved per frame.
    Idempotent bit-for-bit on already-canonical input.
    """
    motion.validate()
    first = motion.frames[0]
    yaw = pose_yaw(first, skeleton)
    anchor = first.root_position * np.array([1.0, 0.0, 1.0])
    frames = list(motion.frames)
    if abs(yaw) > SNAP_TOL or np.abs(anchor).max() > SNAP_TOL:
        fix = quat_about_y(-yaw)
        shift = -quat_rotate(fix, anchor)
        frames = [transform_pose(f, fix, shift) for f in frames]
    min_height = min(forward_kinematics(f, skeleton)[:, 1].min() for f in frames)
    if abs(min_height) > SNAP_TOL:
        drop = np.array([0.0, min_height, 0.0])
        frames = [
            PoseFrame(f.root_position - drop, f.root_orientation, f.joint_rotations)
            for f in frames
        ]
    return motion.with_frames(frames)


def is_canonical(motion: MotionSequence, skeleton: Skeleton, tol=CANONICAL_TOL):
    first = motion.frames[0]
    if np.abs(first.root_position[[0, 2]]).max() > tol:
        return False
    if abs(wrap_angle(pose_yaw(first, skeleton))) > tol:
        return False
    min_height = min(forward_kinematics(f, skeleton)[:, 1].min() for f in motion.frames)
    return abs(min_height) <= tol


def resample(motion: MotionSequence, target_fps) -> MotionSequence:
    """Retime a motion to target_fps, preserving duration within one frame.

    Positions interpolate linearly; rotations interpolate on the unit
    sphere along the shortest arc. Output timestamps that land exactly on
    input frames copy them unchanged.
    """
    if target_fps <= 0.0 or not np.isfinite(target_fps):
        raise MotionError("target fps must be positive")
    src = motion.frames
    if len(src) == 1:
        return motion.with_frames(src, fps=float(target_fps))
    n_out = int(np.floor((len(src) - 1) * target_fps / motion.fps)) + 1
    frames = []
    for k in range(n_out):
        t = k * motion.fps / target_fps
        i = int(np.floor(t))
        frac = t - i
        if frac == 0.0:
            frames.append(src[min(i, len(src) - 1)])
            continue
        if i >= len(src) - 1:
            # Rounding pushed t past the final frame; copy it unchanged.
            frames.append(src[-1])
            continue
        a, b = src[i], src[i + 1]
        frames.append(
            PoseFrame(
                (1.0 - frac) * a.root_position + frac * b.root_position,
                slerp(a.root_orientation, b.root_orientation, frac),
                np.stack(
                    [
                        slerp(a.joint_rotations[j], b.joint_rotations[j], frac)
                        for j in range(a.joint_rotations.shape[0])
                    ]
                ),
            )
        )
    return motion.with_frames(frames, fps=float(target_fps))


def crop_frames(motion: MotionSequence, start, end) -> MotionSequence:
    """Keep the half-open frame range [start, end)."""
    if not (0 <= start < end <= len(motion.frames)):
        raise MotionError(f"invalid crop range [{start}, {end}) for {len(motion.frames)} frames")
    return motion.with_frames(motion.frames[start:end])
