#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import compact
from boostrec.exceptions import MaskSizeMismatch, PixelOutOfBounds, UnorganizedCloudError
from boostrec.keypoints import Keypoint2D
from boostrec.saliency import (
    BinaryMask,
    SaliencyMask,
    binarize,
    filter_cloud,
    filter_keypoints_2d,
)


def test_binarize_threshold():
    mask = SaliencyMask([[0.2, 0.5, 0.7], [0.49, 0.0, 1.0]])
    assert binarize(mask, 0.5, 0).bits.tolist() == [[False, True, True], [False, False, True]]


def test_binarize_dilates_square():
    values = np.zeros((7, 7))
    values[3, 3] = 1.0
    bits = binarize(SaliencyMask(values), 0.5, 2).bits
    expected = np.zeros((7, 7), dtype=bool)
    expected[1:6, 1:6] = True
    assert np.array_equal(bits, expected)


def test_binarize_border_does_not_wrap():
    values = np.zeros((5, 5))
    values[0, 0] = 1.0
    bits = binarize(SaliencyMask(values), 0.5, 1).bits
    assert bits.sum() == 4
    assert not bits[4].any() and not bits[:, 4].any()


def test_binarize_arguments():
    mask = SaliencyMask.full(2, 2)
    with pytest.raises(ValueError):
        binarize(mask, 1.0)
    with pytest.raises(ValueError):
        binarize(mask, 0.0)
    with pytest.raises(ValueError):
        binarize(mask, 0.5, -1)


def test_filter_cloud(organized):
    bits = np.zeros((3, 4), dtype=bool)
    bits[0, 0] = bits[1, 2] = bits[2, 3] = True
    filtered = filter_cloud(organized, BinaryMask(bits))
    assert not filtered.is_organized
    assert filtered.provenance.tolist() == [0, 11]
    assert filtered.rgb.tolist() == organized.rgb[[0, 11]].tolist()


def test_full_mask_keeps_every_valid_point(organized):
    filtered = filter_cloud(organized, BinaryMask.full(4, 3))
    expected = compact(organized)
    assert np.array_equal(filtered.xyz, expected.xyz)
    assert np.array_equal(filtered.provenance, expected.provenance)


def test_filter_cloud_errors(organized, plane):
    with pytest.raises(MaskSizeMismatch):
        filter_cloud(organized, BinaryMask.full(3, 4))
    with pytest.raises(UnorganizedCloudError):
        filter_cloud(plane, BinaryMask.full(len(plane), 1))


def test_filter_keypoints_2d():
    bits = np.zeros((4, 5), dtype=bool)
    bits[1, 1] = bits[3, 4] = True
    mask = BinaryMask(bits)
    keypoints = [Keypoint2D(3, 4, 9.0), Keypoint2D(0, 0, 5.0), Keypoint2D(1, 1, 7.0)]
    kept = filter_keypoints_2d(keypoints, mask)
    assert kept == [keypoints[0], keypoints[2]]
    assert filter_keypoints_2d([(1, 1), (2, 2)], mask) == [(1, 1)]


def test_keypoint_outside_mask():
    with pytest.raises(PixelOutOfBounds):
        filter_keypoints_2d([(4, 0)], BinaryMask.full(5, 4))
    with pytest.raises(PixelOutOfBounds):
        filter_keypoints_2d([Keypoint2D(0, -1, 1.0)], BinaryMask.full(5, 4))
