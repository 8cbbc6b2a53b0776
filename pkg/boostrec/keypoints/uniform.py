#!/usr/bin/python3

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.exceptions import EmptyCloudError
from boostrec.keypoints.datatypes import KeypointSet


def voxel_keys(points: np.ndarray, leaf: float) -> np.ndarray:
    """Integer voxel coordinates of each point, grid anchored at the points' minimum."""
    return np.floor((points - points.min(axis=0)) / leaf).astype(np.int64)


def uniform_sampling(cloud: PointCloud, leaf: float) -> KeypointSet:
    """
    Selects one keypoint per occupied cubic voxel of side ``leaf``.

    Within a voxel the point nearest the centroid of the voxel's points wins,
    ties going to the lowest index. Keypoints are returned in index order.
    """
    if leaf <= 0:
        raise ValueError(f"leaf must be positive, got {leaf}")
    valid = cloud.valid_indices
    if not len(valid):
        raise EmptyCloudError("Uniform sampling needs at least one valid point")

    points = cloud.xyz[valid]
    _, voxel = np.unique(voxel_keys(points, leaf), axis=0, return_inverse=True)
    voxel = voxel.reshape(-1)
    count = np.bincount(voxel).astype(np.float64)
    centroid = np.column_stack(
        [np.bincount(voxel, weights=points[:, i]) for i in range(3)]
    ) / count[:, None]
    dist = np.linalg.norm(points - centroid[voxel], axis=1)

    order = np.lexsort((valid, dist, voxel))
    first = np.ones(len(order), dtype=bool)
    first[1:] = voxel[order][1:] != voxel[order][:-1]
    selected = np.sort(valid[order][first])
    return KeypointSet.from_indices(cloud, selected, "us", leaf=leaf)
