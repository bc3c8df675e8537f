import numpy as np
import pytest

from moscribe.fixtures import (
    elbow_oscillation_motion,
    raise_lower_hand_motion,
    standing_motion,
    turn_step_motion,
    walking_motion,
)
from moscribe.skeleton import Skeleton


@pytest.fixture(scope="session")
def skeleton():
    return Skeleton()


@pytest.fixture(scope="session")
def standing(skeleton):
    return standing_motion(40)


@pytest.fixture(scope="session")
def walking(skeleton):
    return walking_motion(40)


@pytest.fixture(scope="session")
def oscillation(skeleton):
    return elbow_oscillation_motion(skeleton)


@pytest.fixture(scope="session")
def fixture_motions(skeleton):
    """A small pool of distinct described motions."""
    return [
        raise_lower_hand_motion(skeleton),
        walking_motion(30),
        turn_step_motion(skeleton),
        standing_motion(20),
    ]


def random_unit_quat(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_pose(rng, max_angle=0.5, n_perturbed=4):
    """Rest pose with a few joints rotated by modest random angles."""
    from moscribe.fixtures import rest_pose as _rest
    from moscribe.motion import PoseFrame
    from moscribe.rotations import quat_from_axis_angle

    pose = _rest()
    rotations = pose.joint_rotations.copy()
    joints = rng.choice(21, size=n_perturbed, replace=False)
    for j in joints:
        axis = rng.normal(size=3)
        angle = rng.uniform(-max_angle, max_angle)
        rotations[j] = quat_from_axis_angle(axis, angle)
    root = np.array([rng.uniform(-2, 2), 0.96 + rng.uniform(-0.1, 0.1), rng.uniform(-2, 2)])
    from moscribe.rotations import quat_about_y

    return PoseFrame(root, quat_about_y(rng.uniform(-np.pi, np.pi)), rotations)
