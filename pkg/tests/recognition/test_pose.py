#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import RigidTransform
from boostrec.exceptions import DegenerateConfiguration
from boostrec.recognition import Cluster, Correspondence, estimate_pose


def test_recovers_random_transforms(rng):
    for _ in range(100):
        truth = RigidTransform.random(rng, max_translation=0.5)
        model = rng.uniform(-0.1, 0.1, (int(rng.integers(3, 21)), 3))
        pose = estimate_pose(model, truth.apply(model))
        assert np.allclose(pose.as_matrix(), truth.as_matrix(), rtol=0, atol=1e-9)


def test_coplanar_points_keep_proper_rotation(rng):
    truth = RigidTransform.from_euler((10, 170, -35), (0.1, -0.2, 0.7))
    model = np.column_stack([rng.uniform(-0.05, 0.05, (6, 2)), np.zeros(6)])
    pose = estimate_pose(model, truth.apply(model))
    assert np.isclose(np.linalg.det(pose.rotation), 1.0)
    assert np.allclose(pose.as_matrix(), truth.as_matrix(), rtol=0, atol=1e-9)


def test_from_cluster(rng):
    truth = RigidTransform.from_euler((0, 90, 0), (0, 0, 0.6))
    model = rng.uniform(-0.05, 0.05, (5, 3))
    scene = truth.apply(model)
    members = tuple(
        Correspondence(i, scene[i], "m", "v", i, model[i], 0.0) for i in range(len(model))
    )
    pose = estimate_pose(Cluster("m", "v", members))
    assert np.allclose(pose.as_matrix(), truth.as_matrix(), rtol=0, atol=1e-9)


def test_member_order_does_not_matter(rng):
    truth = RigidTransform.random(rng)
    model = rng.uniform(-0.1, 0.1, (12, 3))
    scene = truth.apply(model) + rng.normal(0, 0.002, model.shape)
    order = rng.permutation(len(model))
    first = estimate_pose(model, scene)
    second = estimate_pose(model[order], scene[order])
    assert np.array_equal(first.as_matrix(), second.as_matrix())


def test_noisy_fit_is_close(rng):
    truth = RigidTransform.from_euler((20, -40, 60), (0.05, 0, 0.65))
    model = rng.uniform(-0.06, 0.06, (200, 3))
    scene = truth.apply(model) + rng.normal(0, 0.0005, model.shape)
    pose = estimate_pose(model, scene)
    assert pose.translation_error(truth) < 0.001
    assert pose.rotation_error(truth) < np.radians(1)


def test_too_few_points():
    with pytest.raises(DegenerateConfiguration, match="at least 3"):
        estimate_pose(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(DegenerateConfiguration):
        estimate_pose(Cluster("m", "v", ()))


def test_collinear_points():
    line = np.outer(np.arange(5) * 0.01, [1, 2, 3])
    with pytest.raises(DegenerateConfiguration, match="Model"):
        estimate_pose(line, line + [0, 0, 0.6])
    spread = np.array([[0, 0, 0], [0.1, 0, 0], [0, 0.1, 0], [0, 0, 0.1]])
    with pytest.raises(DegenerateConfiguration, match="Scene"):
        estimate_pose(spread, np.zeros((4, 3)))


def test_length_mismatch():
    with pytest.raises(ValueError):
        estimate_pose(np.zeros((4, 3)), np.zeros((3, 3)))
