#!/usr/bin/python3

from typing import List, Sequence, Tuple, TypeVar, Union

import cv2
import numpy as np

from boostrec.cloud.datatypes import PointCloud, compact
from boostrec.exceptions import MaskSizeMismatch, PixelOutOfBounds, UnorganizedCloudError
from boostrec.saliency.raster import BinaryMask, SaliencyMask

K = TypeVar("K")


def binarize(mask: SaliencyMask, threshold: float = 0.5, dilate_px: int = 8) -> BinaryMask:
    """Thresholds a mask (salient iff value >= threshold), then dilates the salient
    region with a square kernel of radius ``dilate_px``."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if dilate_px < 0:
        raise ValueError(f"dilate_px must be non-negative, got {dilate_px}")
    bits = (mask.values >= threshold).astype(np.uint8)
    if dilate_px and bits.size:
        kernel = np.ones((2 * dilate_px + 1, 2 * dilate_px + 1), dtype=np.uint8)
        bits = cv2.dilate(bits, kernel, borderType=cv2.BORDER_CONSTANT, borderValue=0)
    return BinaryMask(bits.astype(bool))


def _check_size(cloud: PointCloud, mask: BinaryMask) -> None:
    if not cloud.is_organized:
        raise UnorganizedCloudError("Saliency filtering needs an organized cloud")
    if mask.size != (cloud.width, cloud.height):
        raise MaskSizeMismatch((cloud.width, cloud.height), mask.size)


def filter_cloud(cloud: PointCloud, mask: BinaryMask) -> PointCloud:
    """Unorganized cloud of the valid points whose pixel is salient, with provenance."""
    _check_size(cloud, mask)
    return compact(cloud, keep=mask.bits.reshape(-1))


def _pixel(keypoint: Union[Sequence, object]) -> Tuple[int, int]:
    row = getattr(keypoint, "row", None)
    if row is not None:
        return int(row), int(getattr(keypoint, "col"))
    return int(keypoint[0]), int(keypoint[1])  # type: ignore


def filter_keypoints_2d(keypoints: Sequence[K], mask: BinaryMask) -> List[K]:
    """Keeps the (row, col) keypoints lying on salient pixels, order preserved."""
    kept = []
    for keypoint in keypoints:
        row, col = _pixel(keypoint)
        if not (0 <= row < mask.height and 0 <= col < mask.width):
            raise PixelOutOfBounds(
                f"Keypoint ({row}, {col}) outside {mask.width}x{mask.height} mask"
            )
        if mask.bits[row, col]:
            kept.append(keypoint)
    return kept
