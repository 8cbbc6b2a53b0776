#!/usr/bin/python3

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from boostrec.cloud.datatypes import PointCloud, XyzLike, as_xyz
from boostrec.exceptions import InsufficientNeighbors
from boostrec.spatial.kdtree import KdTree3, gather

MIN_NEIGHBORS = 5
AXIS_TOLERANCE = 1e-6
# neighbours closer than this to the dividing plane count for neither side
SIDE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class LocalReferenceFrame:

    """Orthonormal, right-handed axes attached to a keypoint."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        axes = self.as_matrix()
        if not np.allclose(axes @ axes.T, np.eye(3), rtol=0, atol=AXIS_TOLERANCE):
            raise ValueError("LRF axes are not orthonormal")
        if not np.allclose(np.cross(axes[0], axes[1]), axes[2], rtol=0, atol=AXIS_TOLERANCE):
            raise ValueError("LRF axes are not right-handed")

    @classmethod
    def from_matrix(cls, axes: np.ndarray) -> "LocalReferenceFrame":
        axes = np.asarray(axes, dtype=np.float64).reshape(3, 3)
        return cls(axes[0].copy(), axes[1].copy(), axes[2].copy())

    def as_matrix(self) -> np.ndarray:
        """Axes as matrix rows, so ``as_matrix() @ v`` expresses v in the frame."""
        return np.vstack([self.x, self.y, self.z]).astype(np.float64)


def compute_lrf(
    cloud: PointCloud, tree: KdTree3, keypoint: XyzLike, radius: float
) -> LocalReferenceFrame:
    """
    Computes the SHOT local reference frame of a keypoint.

    The scatter matrix is centred on the keypoint with neighbour weights
    ``radius - distance``. The x axis follows the largest eigenvalue and z the
    smallest; each is oriented towards the side holding more neighbours, with
    exact ties making the largest-magnitude component positive. y = z × x.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    center = as_xyz(keypoint)
    index, dist = tree.radius_indices(center, radius)
    if len(index) < MIN_NEIGHBORS:
        raise InsufficientNeighbors(len(index), MIN_NEIGHBORS, radius)
    frames = _frames(
        tree.cloud.xyz[index] - center, radius - dist, np.array([0, len(index)])
    )
    return LocalReferenceFrame.from_matrix(frames[0])


def compute_lrfs(
    tree: KdTree3, centers: np.ndarray, radius: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Frames for many keypoints at once.

    Returns an (m, 3, 3) array of axes as rows and a boolean array marking the
    keypoints with enough neighbours; failed frames are NaN."""
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 3)
    frames = np.full((len(centers), 3, 3), np.nan)
    if not len(centers):
        return frames, np.zeros(0, dtype=bool)
    neighborhoods = tree.radius_many(centers, radius)
    ok = np.array([len(i) >= MIN_NEIGHBORS for i in neighborhoods])
    if ok.any():
        offsets, flat = gather([n for n, good in zip(neighborhoods, ok) if good])
        owner = np.repeat(np.flatnonzero(ok), np.diff(offsets))
        diffs = tree.cloud.xyz[flat] - centers[owner]
        weights = radius - np.linalg.norm(diffs, axis=1)
        frames[ok] = _frames(diffs, weights, offsets)
    return frames, ok


def _frames(diffs: np.ndarray, weights: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    starts = offsets[:-1]
    outer = np.einsum("n,ni,nj->nij", weights, diffs, diffs)
    scatter = np.add.reduceat(outer, starts, axis=0)
    total = np.add.reduceat(weights, starts)
    total[total == 0] = 1.0
    scatter /= total[:, None, None]

    _, vectors = np.linalg.eigh(scatter)
    x_axis = vectors[:, :, 2]
    z_axis = vectors[:, :, 0]
    owner = np.repeat(np.arange(len(starts)), np.diff(offsets))
    x_axis = _disambiguate(x_axis, diffs, owner)
    z_axis = _disambiguate(z_axis, diffs, owner)
    y_axis = np.cross(z_axis, x_axis)
    return np.stack([x_axis, y_axis, z_axis], axis=1)


def _disambiguate(axis: np.ndarray, diffs: np.ndarray, owner: np.ndarray) -> np.ndarray:
    side = np.einsum("ni,ni->n", diffs, axis[owner])
    count = len(axis)
    positive = np.bincount(owner, weights=side > SIDE_TOLERANCE, minlength=count)
    negative = np.bincount(owner, weights=side < -SIDE_TOLERANCE, minlength=count)
    flip = negative > positive
    tie = negative == positive
    if tie.any():
        largest = np.abs(axis).argmax(axis=1)
        flip |= tie & (axis[np.arange(count), largest] < 0)
    axis = axis.copy()
    axis[flip] *= -1
    return axis
