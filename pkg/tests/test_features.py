import numpy as np
import pytest

from conftest import random_pose
from moscribe.features import (
    FEATURE_DIM,
    FeatureSequence,
    decode_features,
    decoded_positions,
    encode_features,
    layout_slice,
)
from moscribe.fixtures import standing_motion, walking_motion
from moscribe.motion import MotionError, MotionSequence, canonicalize
from moscribe.skeleton import forward_kinematics


def fk_all(motion, skeleton):
    return np.stack([forward_kinematics(f, skeleton) for f in motion.frames])


def random_canonical_motion(skeleton, n_frames=24, seed=0):
    rng = np.random.default_rng(seed)
    frames = [random_pose(rng) for _ in range(n_frames)]
    return canonicalize(MotionSequence(f"rand{seed}", 20.0, frames), skeleton)


def test_static_standing_features(skeleton, standing):
    feats = encode_features(standing, skeleton)
    assert feats.data.shape == (40, FEATURE_DIM)
    assert np.all(feats.data[:, layout_slice("joint_velocities")] == 0.0)
    assert np.all(feats.data[:, layout_slice("root_linear_velocity")] == 0.0)
    assert np.all(feats.data[:, layout_slice("root_angular_velocity")] == 0.0)
    assert np.all(feats.data[:, layout_slice("foot_contacts")] == 1.0)


def test_feature_vector_length(skeleton, fixture_motions):
    for motion in fixture_motions:
        feats = encode_features(motion, skeleton)
        assert feats.data.shape == (len(motion.frames), 263)


def test_walk_forward_velocity_channel(skeleton):
    # 1 m/s at 20 fps = 0.05 m per frame along the facing direction.
    walk = walking_motion(40, speed_mps=1.0)
    feats = encode_features(walk, skeleton)
    np.testing.assert_allclose(feats.data[:, 2], 0.05, atol=1e-9)
    np.testing.assert_allclose(feats.data[:, 1], 0.0, atol=1e-9)


def test_contacts_within_unit_interval(skeleton, fixture_motions):
    for motion in fixture_motions:
        contacts = encode_features(motion, skeleton).data[:, layout_slice("foot_contacts")]
        assert np.all((contacts == 0.0) | (contacts == 1.0))


def test_encode_rejects_wrong_fps(skeleton):
    motion = standing_motion(10, fps=30.0)
    with pytest.raises(MotionError, match="fps"):
        encode_features(motion, skeleton)


def test_encode_rejects_non_canonical(skeleton):
    motion = walking_motion(10)
    shifted = motion.with_frames(
        [
            type(f)(f.root_position + np.array([5.0, 0, 0]), f.root_orientation, f.joint_rotations)
            for f in motion.frames
        ]
    )
    with pytest.raises(MotionError, match="canonical"):
        encode_features(shifted, skeleton)


def test_single_frame_velocities_zero(skeleton):
    motion = standing_motion(1)
    feats = encode_features(motion, skeleton)
    assert np.all(feats.data[:, layout_slice("joint_velocities")] == 0.0)
    assert np.all(feats.data[:, layout_slice("root_linear_velocity")] == 0.0)


def test_decode_zero_velocity_single_frame(skeleton, standing):
    feats = encode_features(standing_motion(1), skeleton)
    motion = decode_features(feats, skeleton)
    assert len(motion.frames) == 1
    root = motion.frames[0].root_position
    assert root[0] == pytest.approx(0.0, abs=1e-12)
    assert root[2] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_encode_decode_roundtrip_positions(skeleton, seed):
    motion = random_canonical_motion(skeleton, seed=seed)
    feats = encode_features(motion, skeleton)
    decoded = decode_features(feats, skeleton)
    np.testing.assert_allclose(fk_all(decoded, skeleton), fk_all(motion, skeleton), atol=1e-3)


def test_roundtrip_on_bundled_fixtures(skeleton, fixture_motions):
    for motion in fixture_motions:
        feats = encode_features(motion, skeleton)
        decoded = decode_features(feats, skeleton)
        np.testing.assert_allclose(
            fk_all(decoded, skeleton), fk_all(motion, skeleton), atol=1e-3
        )


def test_double_roundtrip_features_close(skeleton):
    motion = random_canonical_motion(skeleton, seed=3)
    feats = encode_features(motion, skeleton)
    feats2 = encode_features(decode_features(feats, skeleton), skeleton)
    np.testing.assert_allclose(feats2.data, feats.data, atol=1e-3)


def test_decoded_positions_match_channels(skeleton, walking):
    feats = encode_features(walking, skeleton)
    positions = decoded_positions(feats, skeleton)
    np.testing.assert_allclose(positions, fk_all(walking, skeleton), atol=1e-9)


def test_malformed_vector_length_rejected():
    with pytest.raises(MotionError, match="263"):
        FeatureSequence(np.zeros((5, 100)))
