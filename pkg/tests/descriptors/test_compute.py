#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import RigidTransform, transform_cloud
from boostrec.descriptors import DescriptorFamily, compute_descriptors, support_radius
from boostrec.exceptions import MissingColorError
from boostrec.spatial import build_tree


@pytest.mark.parametrize(
    "family,length", [("shot", 352), ("cshot", 1344), ("fpfh", 33), ("pfhrgb", 250)]
)
def test_lengths(surface, keypoints, family, length):
    cloud, tree = surface
    descriptors = compute_descriptors(family, cloud, tree, keypoints, 0.012)
    assert descriptors.family == DescriptorFamily(family)
    assert descriptors.values.shape == (len(keypoints), length)
    assert descriptors.indices.tolist() == keypoints.tolist()
    assert np.array_equal(descriptors.positions, cloud.xyz[keypoints])
    assert descriptors.valid.all()


@pytest.mark.parametrize("family", list(DescriptorFamily))
def test_rigid_invariance(surface, keypoints, family):
    cloud, tree = surface
    transform = RigidTransform.from_euler((35, -20, 110), (0.2, -0.1, 0.3))
    moved = transform_cloud(cloud, transform)
    before = compute_descriptors(family, cloud, tree, keypoints, 0.015)
    after = compute_descriptors(family, moved, build_tree(moved), keypoints, 0.015)
    assert np.allclose(before.values, after.values, rtol=0, atol=1e-6)


def test_empty_indices(surface):
    cloud, tree = surface
    descriptors = compute_descriptors("fpfh", cloud, tree, [])
    assert len(descriptors) == 0 and descriptors.dim == 33


@pytest.mark.parametrize("family", ["cshot", "pfhrgb"])
def test_color_families_need_rgb(surface, keypoints, family):
    cloud, tree = surface
    with pytest.raises(MissingColorError):
        compute_descriptors(family, cloud.replace(rgb=None), tree, keypoints)


def test_invalid_radius(surface, keypoints):
    cloud, tree = surface
    with pytest.raises(ValueError):
        compute_descriptors("shot", cloud, tree, keypoints, 0)


def test_support_radius():
    assert support_radius("fpfh", 0.05) == 0.1
    assert support_radius(DescriptorFamily.SHOT, 0.05) == 0.05
    assert support_radius("pfhrgb", 0.03) == 0.03
