"""Bundled deterministic motion fixtures and demo data.

The builders produce canonical 20-fps motions on the default skeleton so
tests and the demo workspace never depend on external capture data. The
"000314" annotation strings mirror the published data-format example.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .motion import MotionSequence, PoseFrame
from .motion_io import save_motion
from .rotations import quat_about_y, quat_from_axis_angle
from .skeleton import DEFAULT_ROOT_HEIGHT, Skeleton

EVAL_FPS = 20.0

BPMSD_000314 = (
    "",
    "Bend your elbows and raise your hands up to your head.",
    "",
    "",
    "Turn your upper body to the right slightly.",
    "",
    "Straighten your elbows and lower your hands to your thighs.",
    "Straighten your elbows completely and move your hands back to your sides.",
)

BPMP_000314 = (
    "Initially, the person bends his elbows and raises his hands to his head. Then, he "
    "slightly turns his upper body to the right. Afterward, he straightens his elbows and "
    "lowers his hands to his thighs. Finally, he straightens his elbows completely and moves "
    "his hands back to his sides.",
    "First, the person bends the elbows and raises his hands above his head. Then, he "
    "slightly rotates his upper body to the right. Subsequently, he straightens the elbows "
    "and lowers his hands to rest on his thighs. Finally, he fully extends his elbows and "
    "returns his hands to their positions at his sides.",
    "The person begins by bending the elbows and raising the hands toward the head. "
    "Subsequently, he slightly twists his upper body to the right. Afterward, he extends the "
    "elbows and lowers the hands toward the thighs, then fully straightening the elbows and "
    "moving the hands back to the sides.",
)

# Worked-example inputs for the snippet-description template.
TEMPLATE_EXAMPLE_TEXTS = (
    "",
    "",
    "Move your right leg forward slightly.",
    "Turn to the left. Move your left leg forward. Move your left hand back slightly.",
    "Lean to the right. Move your right leg forward.",
)


def rest_pose(root_xz=(0.0, 0.0), root_height=DEFAULT_ROOT_HEIGHT, yaw=0.0):
    pose = PoseFrame.rest((root_xz[0], root_height, root_xz[1]))
    if yaw:
        pose = PoseFrame(pose.root_position, quat_about_y(yaw), pose.joint_rotations)
    return pose


def with_joint_rotation(pose: PoseFrame, skeleton: Skeleton, joint_name, quat):
    rotations = pose.joint_rotations.copy()
    rotations[skeleton.index(joint_name) - 1] = quat
    return PoseFrame(pose.root_position, pose.root_orientation, rotations)


def standing_motion(n_frames=40, fps=EVAL_FPS, id="standing"):
    """A motionless canonical standing pose."""
    frame = rest_pose()
    return MotionSequence(id, fps, [frame] * n_frames)


def walking_motion(n_frames=40, fps=EVAL_FPS, speed_mps=1.0, id="walk_forward"):
    """Root advancing along +Z at constant speed, posture frozen."""
    frames = [
        rest_pose(root_xz=(0.0, k * speed_mps / fps)) for k in range(n_frames)
    ]
    return MotionSequence(id, fps, frames)


def raised_wrist_pose(skeleton: Skeleton, dy, base=None, side="right"):
    """Rest pose with one wrist lifted vertically by dy meters.

    The shoulder rotates about the facing axis, which moves only that
    arm's wrist (the elbow angle and every other tracked channel stay
    fixed).
    """
    base = base or rest_pose()
    arm_span = abs(skeleton.offsets[skeleton.index(f"{side}_elbow")][0]) + abs(
        skeleton.offsets[skeleton.index(f"{side}_wrist")][0]
    )
    angle = np.arcsin(dy / arm_span)
    if side == "right":
        angle = -angle
    return with_joint_rotation(
        base, skeleton, f"{side}_shoulder", quat_from_axis_angle([0.0, 0.0, 1.0], angle)
    )


def raise_lower_hand_motion(skeleton: Skeleton, n_frames=20, fps=EVAL_FPS, peak_dy=0.3,
                            id="raise_lower_right_hand"):
    """Right wrist rises to peak_dy by mid-sequence, then returns."""
    frames = []
    half = n_frames // 2
    for k in range(n_frames):
        if k <= half:
            dy = peak_dy * k / half
        else:
            dy = peak_dy * (n_frames - 1 - k) / (n_frames - 1 - half)
        frames.append(raised_wrist_pose(skeleton, dy))
    return MotionSequence(id, fps, frames)


def turn_step_pose_pair(skeleton: Skeleton, yaw_deg=40.0, swing_rad=0.3):
    """Rest pose, then the same pose yawed left with the left leg swung forward."""
    start = rest_pose()
    end = rest_pose(yaw=np.radians(yaw_deg))
    end = with_joint_rotation(
        end, skeleton, "left_hip", quat_from_axis_angle([1.0, 0.0, 0.0], -swing_rad)
    )
    return start, end


def turn_step_motion(skeleton: Skeleton, n_frames=20, fps=EVAL_FPS, id="turn_and_step"):
    """Interpolates rest -> (turned left, left leg forward) over the sequence.

    The 90-degree turn and 0.5 rad swing keep every per-snippet channel
    magnitude well inside its threshold bucket, so snippet descriptions
    are stable under boundary-aligned cropping.
    """
    from .rotations import slerp

    start, end = turn_step_pose_pair(skeleton, yaw_deg=90.0, swing_rad=0.5)
    frames = []
    for k in range(n_frames):
        t = k / (n_frames - 1)
        rotations = np.stack(
            [
                slerp(start.joint_rotations[j], end.joint_rotations[j], t)
                for j in range(21)
            ]
        )
        frames.append(
            PoseFrame(
                start.root_position,
                slerp(start.root_orientation, end.root_orientation, t),
                rotations,
            )
        )
    return MotionSequence(id, fps, frames)


def elbow_oscillation_motion(skeleton: Skeleton, n_frames=400, fps=EVAL_FPS, period_s=0.8,
                             amplitude_rad=0.4, id="elbow_oscillation"):
    """Single-joint sinusoidal oscillation of the left elbow with period P.

    Pose similarity between frames t and t + d then depends only on the
    phase offset, dipping at d = P/2 and returning to 1 at P. The small
    amplitude keeps the descriptor in its linear regime, where the mean
    similarity is monotone in the phase distance.
    """
    base = rest_pose()
    frames = []
    for k in range(n_frames):
        angle = amplitude_rad * np.sin(2.0 * np.pi * k / (period_s * fps))
        frames.append(
            with_joint_rotation(
                base, skeleton, "left_elbow", quat_from_axis_angle([0.0, 0.0, 1.0], angle)
            )
        )
    return MotionSequence(id, fps, frames)


def motion_000314(fps=EVAL_FPS, id="000314"):
    """An 80-frame companion motion for the bundled annotation fixture."""
    skeleton = Skeleton()
    frames = []
    for k in range(80):
        lift = 0.25 * min(1.0, max(0.0, (k - 10) / 10.0))
        lift *= max(0.0, 1.0 - max(0.0, (k - 60) / 15.0))
        frames.append(raised_wrist_pose(skeleton, lift))
    return MotionSequence(id, fps, frames)


def demo_workspace(directory, skeleton=None):
    """Write the demo motions, annotations, and stub-generator registry.

    Layout: motions/*.mofg (+ sidecars), annotations/all.bpmsd.json and
    all.bpmp.json, stub_fixtures.json mapping fixture ids to conditioning
    texts and motion files.
    """
    from .pipeline import describe_motion
    from .store import AnnotationStore
    from .textgen import assemble_template

    skeleton = skeleton or Skeleton()
    directory = Path(directory)
    motion_dir = directory / "motions"
    motion_dir.mkdir(parents=True, exist_ok=True)

    wave = raise_lower_hand_motion(skeleton, id="demo_wave")
    walk = walking_motion(20, id="demo_walk")
    showcase = motion_000314()

    store = AnnotationStore(directory / "annotations")
    store.set_bpmsd("000314", list(BPMSD_000314))
    store.set_bpmp("000314", list(BPMP_000314))

    registry = []
    for motion, coarse in (
        (wave, "a person raises the right hand and lowers it"),
        (walk, "a person walks forward"),
    ):
        texts = describe_motion(motion, skeleton)
        store.set_bpmsd(motion.id, list(texts.texts))
        save_motion(motion_dir / f"{motion.id}.mofg", motion, skeleton)
        registry.append(
            {
                "id": motion.id,
                "coarse_text": coarse,
                "detailed_text": assemble_template(texts),
                "motion_file": f"motions/{motion.id}.mofg",
            }
        )
    save_motion(motion_dir / "000314.mofg", showcase, skeleton)

    (directory / "stub_fixtures.json").write_text(
        json.dumps(registry, indent=2), encoding="utf-8"
    )
    return directory
