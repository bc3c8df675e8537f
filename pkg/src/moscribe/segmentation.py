"""Fixed-duration snippet segmentation and snippet-duration selection.

Motions are tiled by snippets of round(duration * fps) frames; a shorter
tail is kept as its own snippet. A snippet's end pose is the first frame
of the next snippet (the shared boundary), so start and end poses are
exactly one snippet duration apart; the last snippet ends on the final
frame.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .motion import MotionError, MotionSequence, PoseFrame, pose_yaw
from .rotations import quat_about_y, quat_rotate
from .skeleton import Skeleton, forward_kinematics

DEFAULT_SNIPPET_DURATION_S = 0.5
DEFAULT_DURATION_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))


class SegmentationError(MotionError):
    pass


@dataclass(frozen=True, eq=False)
class Snippet:
    motion_id: str
    index: int
    frame_range: tuple
    start_pose: PoseFrame
    end_pose: PoseFrame

    @property
    def num_frames(self):
        return self.frame_range[1] - self.frame_range[0]


def snippet_step(fps, snippet_duration_s=DEFAULT_SNIPPET_DURATION_S):
    step = int(round(snippet_duration_s * fps))
    if step <= 0:
        raise SegmentationError(
            f"snippet duration {snippet_duration_s} s is below one frame at {fps} fps"
        )
    return step


def segment(motion: MotionSequence, snippet_duration_s=DEFAULT_SNIPPET_DURATION_S):
    """Split a motion into contiguous snippets covering every frame once."""
    if snippet_duration_s <= 0:
        raise SegmentationError("snippet duration must be positive")
    step = snippet_step(motion.fps, snippet_duration_s)
    total = len(motion.frames)
    snippets = []
    for index, start in enumerate(range(0, total, step)):
        end = min(start + step, total)
        snippets.append(
            Snippet(
                motion_id=motion.id,
                index=index,
                frame_range=(start, end),
                start_pose=motion.frames[start],
                end_pose=motion.frames[min(start + step, total - 1)],
            )
        )
    return snippets


# Angle features use every parent-joint-child triple of the skeleton, in
# joint order, so the descriptor layout is a pure function of the template.
def _angle_triples(skeleton: Skeleton):
    children = {j: [] for j in range(skeleton.num_joints)}
    for j in range(1, skeleton.num_joints):
        children[skeleton.parent_index[j]].append(j)
    triples = []
    for j in range(1, skeleton.num_joints):
        p = skeleton.parent_index[j]
        if p < 0:
            continue
        for c in children[j]:
            triples.append((p, j, c))
    return triples


def pose_descriptor(pose: PoseFrame, skeleton: Skeleton):
    """Unit-norm geometric pose signature.

    Concatenates facing-normalized root-relative joint positions with the
    cosine of every bone-pair angle, then scales to unit length.
    """
    positions = forward_kinematics(pose, skeleton)
    yaw = pose_yaw(pose, skeleton, positions)
    rel = quat_rotate(quat_about_y(-yaw), positions[1:] - positions[0])
    cosines = []
    for p, j, c in _angle_triples(skeleton):
        a = positions[j] - positions[p]
        b = positions[c] - positions[j]
        cosines.append(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    descriptor = np.concatenate([rel.reshape(-1), cosines])
    norm = np.linalg.norm(descriptor)
    if norm < 1e-12:
        raise SegmentationError("zero-magnitude pose descriptor")
    return descriptor / norm


@dataclass(frozen=True)
class ProfileEntry:
    duration_s: float
    mean: float
    ci_halfwidth: float
    n: int


@dataclass(frozen=True)
class DurationProfile:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        durations = [e.duration_s for e in self.entries]
        if any(b <= a for a, b in zip(durations, durations[1:])):
            raise SegmentationError("profile durations must be strictly increasing")
        for e in self.entries:
            if not -1.0 - 1e-9 <= e.mean <= 1.0 + 1e-9:
                raise SegmentationError("profile means must lie in [-1, 1]")
            if e.ci_halfwidth < 0.0:
                raise SegmentationError("profile halfwidths must be non-negative")

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["duration_s", "mean", "ci_halfwidth", "n"])
        for e in self.entries:
            writer.writerow([e.duration_s, repr(e.mean), repr(e.ci_halfwidth), e.n])
        return out.getvalue()


def duration_similarity_profile(
    motions,
    skeleton: Skeleton,
    durations=DEFAULT_DURATION_GRID,
    samples_per_duration=1000,
    seed=0,
):
    """Mean cosine similarity between snippet start/end pose descriptors.

    For each candidate duration, start frames are sampled uniformly over
    all valid positions across the motion pool (so motions weigh in by
    frame count). The per-duration generator is split off the seed
    deterministically, making the profile reproducible bit-for-bit.
    """
    durations = sorted(durations)
    descriptor_cache = {}

    def descr(m_idx, frame_idx):
        key = (m_idx, frame_idx)
        if key not in descriptor_cache:
            descriptor_cache[key] = pose_descriptor(
                motions[m_idx].frames[frame_idx], skeleton
            )
        return descriptor_cache[key]

    entries = []
    for k, duration in enumerate(durations):
        candidates = []
        for m_idx, motion in enumerate(motions):
            step = int(round(duration * motion.fps))
            count = len(motion.frames) - step
            if step >= 1 and count > 0:
                candidates.append((m_idx, step, count))
        if not candidates:
            raise SegmentationError(f"duration {duration} s is longer than every motion")
        counts = np.array([c[2] for c in candidates])
        cumulative = np.cumsum(counts)
        rng = np.random.default_rng([seed, k])
        draws = rng.integers(0, cumulative[-1], size=samples_per_duration)
        sims = np.empty(samples_per_duration)
        for i, draw in enumerate(draws):
            which = int(np.searchsorted(cumulative, draw, side="right"))
            m_idx, step, _ = candidates[which]
            start = int(draw - (cumulative[which - 1] if which else 0))
            sims[i] = float(np.dot(descr(m_idx, start), descr(m_idx, start + step)))
        std = sims.std(ddof=1) if samples_per_duration > 1 else 0.0
        entries.append(
            ProfileEntry(
                duration_s=float(duration),
                mean=float(sims.mean()),
                ci_halfwidth=float(1.96 * std / np.sqrt(samples_per_duration)),
                n=int(samples_per_duration),
            )
        )
    return DurationProfile(entries)


def select_duration(profile: DurationProfile, cap_s=DEFAULT_SNIPPET_DURATION_S):
    """Pick the snippet duration: the similarity minimizer, capped at cap_s.

    If the global minimizer sits beyond the cap, the largest grid entry
    within the cap is used instead. Ties resolve toward the smaller
    duration.
    """
    if not profile.entries:
        raise SegmentationError("empty duration profile")
    within = [e for e in profile.entries if e.duration_s <= cap_s]
    if not within:
        raise SegmentationError(f"no profile entry at or below the {cap_s} s cap")
    best = min(profile.entries, key=lambda e: (e.mean, e.duration_s))
    if best.duration_s <= cap_s:
        return best.duration_s
    return within[-1].duration_s
