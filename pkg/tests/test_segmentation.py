import numpy as np
import pytest

from conftest import random_pose
from moscribe.fixtures import standing_motion
from moscribe.motion import MotionSequence
from moscribe.segmentation import (
    DurationProfile,
    ProfileEntry,
    SegmentationError,
    duration_similarity_profile,
    pose_descriptor,
    segment,
    select_duration,
)
from moscribe.skeleton import mirror_pose


def make_motion(n_frames, fps=20.0):
    frame = standing_motion(1).frames[0]
    return MotionSequence("m", fps, [frame] * n_frames)


# -- segment ----------------------------------------------------------------


def test_segment_exact_division():
    snippets = segment(make_motion(70), 0.5)
    assert len(snippets) == 7
    assert all(s.num_frames == 10 for s in snippets)


def test_segment_remainder_rule():
    snippets = segment(make_motion(73), 0.5)
    assert len(snippets) == 8
    assert snippets[-1].frame_range == (70, 73)
    assert snippets[-1].num_frames == 3


def test_segment_short_motion_single_snippet():
    snippets = segment(make_motion(5), 0.5)
    assert len(snippets) == 1
    assert snippets[0].frame_range == (0, 5)


def test_segment_zero_step_rejected():
    with pytest.raises(SegmentationError):
        segment(make_motion(10), 0.01)
    with pytest.raises(SegmentationError):
        segment(make_motion(10), -1.0)


def test_partition_coverage_fuzz():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        n = int(rng.integers(1, 1001))
        duration = float(rng.uniform(0.05, 2.0))
        if round(duration * 20.0) == 0:
            continue
        snippets = segment(make_motion(n), duration)
        ranges = [s.frame_range for s in snippets]
        assert ranges[0][0] == 0
        assert ranges[-1][1] == n
        for (a0, a1), (b0, b1) in zip(ranges, ranges[1:]):
            assert a1 == b0  # contiguous, non-overlapping
        step = round(duration * 20.0)
        assert all(r[1] - r[0] == step for r in ranges[:-1])
        assert 1 <= ranges[-1][1] - ranges[-1][0] <= step


def test_boundary_sharing_same_object():
    motion = make_motion(73)
    snippets = segment(motion, 0.5)
    for a, b in zip(snippets, snippets[1:]):
        assert a.end_pose is b.start_pose
    assert snippets[-1].end_pose is motion.frames[-1]


# -- pose descriptor --------------------------------------------------------


def test_descriptor_identical_poses(skeleton):
    pose = standing_motion(1).frames[0]
    d1 = pose_descriptor(pose, skeleton)
    d2 = pose_descriptor(pose, skeleton)
    assert float(d1 @ d2) == pytest.approx(1.0, abs=1e-12)


def test_descriptor_unit_norm(skeleton):
    rng = np.random.default_rng(31)
    for _ in range(20):
        d = pose_descriptor(random_pose(rng), skeleton)
        assert abs(np.linalg.norm(d) - 1.0) < 1e-9


def test_descriptor_mirror_permutation(skeleton):
    """Mirrored pose -> mirror-permuted, X-negated descriptor."""
    from moscribe.segmentation import _angle_triples

    sigma = skeleton.mirror_map()
    triples = _angle_triples(skeleton)
    triple_index = {t: i for i, t in enumerate(triples)}
    rng = np.random.default_rng(37)
    for _ in range(10):
        pose = random_pose(rng)
        d = pose_descriptor(pose, skeleton)
        dm = pose_descriptor(mirror_pose(pose, skeleton), skeleton)
        expected = np.empty_like(d)
        for j in range(1, 22):
            src = (sigma[j] - 1) * 3
            dst = (j - 1) * 3
            expected[dst] = -d[src]
            expected[dst + 1] = d[src + 1]
            expected[dst + 2] = d[src + 2]
        base = 63
        for i, (p, j, c) in enumerate(triples):
            expected[base + i] = d[base + triple_index[(sigma[p], sigma[j], sigma[c])]]
        np.testing.assert_allclose(dm, expected, atol=1e-9)


# -- duration profiles ------------------------------------------------------


def test_profile_constant_motion(skeleton):
    motion = standing_motion(100)
    profile = duration_similarity_profile(
        [motion], skeleton, durations=[0.1, 0.3, 0.5], samples_per_duration=50, seed=1
    )
    for entry in profile.entries:
        assert entry.mean == pytest.approx(1.0, abs=1e-12)
        assert entry.ci_halfwidth == pytest.approx(0.0, abs=1e-12)
        assert entry.n == 50


def test_profile_sinusoid_minimum_at_half_period(skeleton, oscillation):
    profile = duration_similarity_profile(
        [oscillation],
        skeleton,
        durations=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
        samples_per_duration=500,
        seed=5,
    )
    means = [e.mean for e in profile.entries]
    # period 0.8 s -> minimum at the grid point nearest 0.4 s
    assert profile.entries[int(np.argmin(means))].duration_s == 0.4


def test_profile_dips_then_rises(skeleton, oscillation):
    """Below one period, similarity first decreases then increases."""
    profile = duration_similarity_profile(
        [oscillation],
        skeleton,
        durations=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
        samples_per_duration=500,
        seed=5,
    )
    means = [e.mean for e in profile.entries]
    k = int(np.argmin(means))
    assert 0 < k < len(means) - 1
    assert all(a > b for a, b in zip(means[: k + 1], means[1 : k + 1]))
    assert all(a < b for a, b in zip(means[k:], means[k + 1 :]))


def test_profile_deterministic(skeleton, oscillation):
    kwargs = dict(durations=[0.2, 0.4], samples_per_duration=100, seed=42)
    p1 = duration_similarity_profile([oscillation], skeleton, **kwargs)
    p2 = duration_similarity_profile([oscillation], skeleton, **kwargs)
    assert p1.entries == p2.entries


def test_profile_halfwidth_shrinks_with_samples(skeleton, oscillation):
    widths = []
    for n in (10, 100, 1000):
        profile = duration_similarity_profile(
            [oscillation], skeleton, durations=[0.3], samples_per_duration=n, seed=8
        )
        widths.append(profile.entries[0].ci_halfwidth)
    assert widths[0] > widths[1] > widths[2]


def test_profile_means_bounded(skeleton, oscillation, fixture_motions):
    profile = duration_similarity_profile(
        fixture_motions + [oscillation], skeleton,
        durations=[0.1, 0.5, 0.9], samples_per_duration=200, seed=3,
    )
    for entry in profile.entries:
        assert -1.0 <= entry.mean <= 1.0
        assert entry.ci_halfwidth >= 0.0


def test_profile_duration_too_long(skeleton):
    with pytest.raises(SegmentationError, match="longer than every motion"):
        duration_similarity_profile(
            [standing_motion(10)], skeleton, durations=[5.0], samples_per_duration=10
        )


def test_profile_csv(skeleton):
    profile = duration_similarity_profile(
        [standing_motion(50)], skeleton, durations=[0.1, 0.2], samples_per_duration=10, seed=0
    )
    csv_text = profile.to_csv()
    lines = csv_text.strip().splitlines()
    assert lines[0] == "duration_s,mean,ci_halfwidth,n"
    assert len(lines) == 3


# -- select_duration --------------------------------------------------------


def entry(d, mean):
    return ProfileEntry(d, mean, 0.0, 10)


def test_select_minimum_within_cap():
    profile = DurationProfile([entry(0.2, 0.9), entry(0.4, 0.5), entry(0.6, 0.7)])
    assert select_duration(profile, 0.5) == 0.4


def test_select_clamps_to_cap():
    # Global minimizer past the cap -> largest grid entry within it.
    profile = DurationProfile([entry(0.2, 0.9), entry(0.4, 0.8), entry(0.8, 0.1)])
    assert select_duration(profile, 0.5) == 0.4


def test_select_flat_profile_prefers_smalled_duration():
    profile = DurationProfile([entry(0.1, 0.5), entry(0.2, 0.5), entry(0.3, 0.5)])
    assert select_duration(profile, 0.5) == 0.1


def test_select_no_entry_within_cap():
    profile = DurationProfile([entry(0.8, 0.5)])
    with pytest.raises(SegmentationError):
        select_duration(profile, 0.5)
