#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import PointCloud
from boostrec.exceptions import PixelOutOfBounds, UnorganizedCloudError
from boostrec.keypoints import Keypoint2D, KeypointSet, fast_detect, lift_to_3d

CORNERS = [(10, 10), (10, 29), (29, 10), (29, 29)]


@pytest.fixture
def square():
    image = np.zeros((40, 40), dtype=np.uint8)
    image[10:30, 10:30] = 255
    return image


def _near(keypoint, corner, tolerance=3):
    return max(abs(keypoint.row - corner[0]), abs(keypoint.col - corner[1])) <= tolerance


def test_square_corners(square):
    keypoints = fast_detect(square, threshold=20)
    assert keypoints
    assert all(any(_near(k, c) for c in CORNERS) for k in keypoints)
    assert all(any(_near(k, c) for k in keypoints) for c in CORNERS)
    assert keypoints == sorted(keypoints)
    assert all(isinstance(k, Keypoint2D) and k.score > 0 for k in keypoints)


def test_suppression_reduces_count(square):
    assert len(fast_detect(square, use_nms=False)) >= len(fast_detect(square))


def test_color_input(square):
    rgb = np.repeat(square[:, :, None], 3, axis=2)
    assert fast_detect(rgb) == fast_detect(square)


def test_constant_image():
    assert fast_detect(np.full((20, 20), 90, dtype=np.uint8)) == []


def test_low_contrast_below_threshold(square):
    assert fast_detect(square // 20, threshold=20) == []


def test_small_image():
    with pytest.raises(ValueError):
        fast_detect(np.zeros((6, 20), dtype=np.uint8))


def test_lift_to_3d(organized):
    keypoints = lift_to_3d([(1, 1), (1, 2), (0, 0), Keypoint2D(1, 1, 3.0)], organized)
    assert keypoints.indices.tolist() == [5, 0]
    assert np.array_equal(keypoints.positions, organized.xyz[[5, 0]])
    assert keypoints.detector == "fast"
    assert len(lift_to_3d([], organized)) == 0


def test_lift_errors(organized, plane):
    with pytest.raises(PixelOutOfBounds):
        lift_to_3d([(3, 0)], organized)
    with pytest.raises(UnorganizedCloudError):
        lift_to_3d([(0, 0)], plane)


def test_keypoint_set_validation(organized):
    with pytest.raises(ValueError):
        KeypointSet([1, 1], organized.xyz[[1, 1]])
    with pytest.raises(ValueError):
        KeypointSet([6], organized.xyz[[6]])
    with pytest.raises(ValueError):
        KeypointSet([0, 1], organized.xyz[[0]])


def test_source_indices(organized):
    subset = organized.subset([11, 7, 2])
    keypoints = KeypointSet.from_indices(subset, [0, 2], "us")
    assert keypoints.source_indices(subset).tolist() == [11, 2]
    assert keypoints.source_indices(PointCloud(subset.xyz)).tolist() == [0, 2]
