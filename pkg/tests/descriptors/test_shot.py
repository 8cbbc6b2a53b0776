#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import PointCloud
from boostrec.descriptors import DescriptorFamily, cshot, shot, shot_many
from boostrec.descriptors.shot import SHAPE_LENGTH, lab_distance, rgb_to_lab
from boostrec.exceptions import MissingColorError
from boostrec.geometry import compute_lrf
from boostrec.spatial import build_tree


def test_rows_have_unit_norm(surface, keypoints):
    cloud, tree = surface
    values, valid = shot_many(cloud, tree, keypoints, 0.015)
    assert values.shape == (len(keypoints), 352)
    assert valid.all()
    assert np.allclose(np.linalg.norm(values, axis=1), 1)
    assert (values >= 0).all()


def test_single_matches_batch(surface, keypoints):
    cloud, tree = surface
    values, _ = shot_many(cloud, tree, keypoints, 0.015)
    for row, index in zip(values, keypoints):
        frame = compute_lrf(cloud, tree, cloud.xyz[index], 0.015)
        descriptor = shot(cloud, tree, int(index), frame, 0.015)
        assert descriptor.family == DescriptorFamily.SHOT
        assert descriptor.keypoint == index
        assert np.allclose(descriptor.values, row, atol=1e-12)


def test_cshot_shape_part_is_shot(surface, keypoints):
    cloud, tree = surface
    shape, _ = shot_many(cloud, tree, keypoints, 0.015)
    combined, valid = shot_many(cloud, tree, keypoints, 0.015, color=True)
    assert combined.shape == (len(keypoints), 1344)
    assert valid.all()
    part = combined[:, :SHAPE_LENGTH]
    part = part / np.linalg.norm(part, axis=1)[:, None]
    assert np.allclose(part, shape, atol=1e-12)


def test_uniform_color_fills_first_color_bin(surface, keypoints):
    cloud, tree = surface
    gray = cloud.replace(rgb=np.full((len(cloud), 3), 128, dtype=np.uint8))
    frame = compute_lrf(gray, tree, gray.xyz[keypoints[0]], 0.015)
    values = cshot(gray, tree, int(keypoints[0]), frame, 0.015).values
    colors = values[SHAPE_LENGTH:].reshape(32, 31)
    assert colors[:, 0].sum() > 0
    assert not colors[:, 1:].any()


def test_color_only_changes_cshot(surface, keypoints, rng):
    cloud, tree = surface
    recolored = cloud.replace(rgb=rng.integers(0, 256, (len(cloud), 3), dtype=np.uint8))
    assert np.array_equal(
        shot_many(cloud, tree, keypoints, 0.015)[0],
        shot_many(recolored, tree, keypoints, 0.015)[0],
    )
    assert not np.allclose(
        shot_many(cloud, tree, keypoints, 0.015, color=True)[0],
        shot_many(recolored, tree, keypoints, 0.015, color=True)[0],
    )


def test_sparse_support_is_invalid(surface):
    cloud, _ = surface
    lonely = PointCloud(
        np.vstack([cloud.xyz, [[1, 1, 1], [1, 1, 1.001]]]),
        normals=np.vstack([cloud.normals, [[0, 0, 1], [0, 0, 1]]]),
    )
    values, valid = shot_many(lonely, build_tree(lonely), [len(cloud)], 0.015)
    assert not valid[0]
    assert not values.any()


def test_cshot_needs_color(surface, keypoints):
    cloud, tree = surface
    with pytest.raises(MissingColorError):
        shot_many(cloud.replace(rgb=None), tree, keypoints, 0.015, color=True)


def test_rgb_to_lab():
    lab = rgb_to_lab(np.array([[255, 255, 255], [0, 0, 0], [255, 0, 0]], dtype=np.uint8))
    assert np.allclose(lab[0], [100, 0, 0], atol=0.01)
    assert np.allclose(lab[1], [0, 0, 0], atol=0.01)
    assert np.allclose(lab[2], [53.24, 80.09, 67.20], atol=0.5)


def test_lab_distance():
    white, black = rgb_to_lab(np.array([[255, 255, 255], [0, 0, 0]], dtype=np.uint8))
    assert lab_distance(white[None], black[None])[0] == pytest.approx(1 / 3, abs=1e-4)
    assert lab_distance(white[None], white[None])[0] == 0
