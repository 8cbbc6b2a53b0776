#!/usr/bin/python3

from typing import List, Sequence

import cv2
import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.exceptions import PixelOutOfBounds, UnorganizedCloudError
from boostrec.keypoints.datatypes import Keypoint2D, KeypointSet

MIN_IMAGE_SIZE = 7


def _gray_uint8(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim == 3:
        image = cv2.cvtColor(image[:, :, :3].astype(np.uint8), cv2.COLOR_RGB2GRAY)
    return np.ascontiguousarray(image, dtype=np.uint8)


def fast_detect(image: np.ndarray, threshold: int = 20, use_nms: bool = True) -> List[Keypoint2D]:
    """
    FAST-9 corners of an 8-bit image (RGB input is converted to grayscale).

    A pixel is a corner when at least 9 contiguous pixels of the radius-3
    circle around it are all brighter than centre + threshold or all darker
    than centre - threshold. With ``use_nms`` a 3x3 non-maximum suppression on
    the corner score is applied. Keypoints are returned in raster order.
    """
    gray = _gray_uint8(image)
    if gray.ndim != 2 or min(gray.shape) < MIN_IMAGE_SIZE:
        raise ValueError(f"FAST needs an image of at least 7x7 pixels, got {gray.shape}")
    detector = cv2.FastFeatureDetector_create(
        threshold=int(threshold),
        nonmaxSuppression=bool(use_nms),
        type=cv2.FAST_FEATURE_DETECTOR_TYPE_9_16,
    )
    found = detector.detect(gray, None)
    keypoints = {
        (int(round(i.pt[1])), int(round(i.pt[0]))): float(i.response) for i in found
    }
    return [Keypoint2D(row, col, score) for (row, col), score in sorted(keypoints.items())]


def lift_to_3d(keypoints: Sequence, cloud: PointCloud) -> KeypointSet:
    """Maps (row, col) keypoints to the points registered at their pixels. Pixels
    without a valid point are dropped, repeated pixels kept once."""
    if not cloud.is_organized:
        raise UnorganizedCloudError("Lifting 2D keypoints needs an organized cloud")
    indices = []
    for keypoint in keypoints:
        row, col = int(keypoint[0]), int(keypoint[1])
        if not (0 <= row < cloud.height and 0 <= col < cloud.width):
            raise PixelOutOfBounds(
                f"Keypoint ({row}, {col}) outside {cloud.width}x{cloud.height} cloud"
            )
        indices.append(row * cloud.width + col)
    index = np.array(indices, dtype=np.int64)
    if len(index):
        _, first = np.unique(index, return_index=True)
        index = index[np.sort(first)]
        index = index[cloud.valid[index]]
    return KeypointSet.from_indices(cloud, index, "fast")
