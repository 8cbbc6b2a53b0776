#!/usr/bin/python3

from typing import Optional, Sequence

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.spatial.kdtree import KdTree3, build_tree

# eigenvalue ratio below which a direction counts as missing
RANK_TOLERANCE = 1e-10


def estimate_normals(
    cloud: PointCloud,
    tree: Optional[KdTree3] = None,
    k: int = 10,
    viewpoint: Sequence[float] = (0.0, 0.0, 0.0),
    indices: Optional[Sequence[int]] = None,
) -> PointCloud:
    """
    Estimates a unit normal per valid point from its k nearest neighbours.

    The normal is the eigenvector of the neighbourhood covariance with the
    smallest eigenvalue, flipped to face ``viewpoint``. Neighbourhoods of rank
    below 2 (coincident or collinear points) get a NaN normal.

    Arguments
    ---------
    cloud : PointCloud
        Cloud to estimate normals for.
    tree : KdTree3, optional
        Tree over ``cloud``. Built on demand when omitted.
    k : int
        Neighbourhood size, the point itself included.
    viewpoint : sequence of float
        Sensor position used to orient the normals.
    indices : sequence of int, optional
        Only estimate normals at these points, all others are left NaN.

    Returns
    -------
    PointCloud
        Copy of ``cloud`` carrying the normals.
    """
    if k < 3:
        raise ValueError(f"k must be at least 3, got {k}")
    if tree is None:
        tree = build_tree(cloud)
    viewpoint = np.asarray(viewpoint, dtype=np.float64).reshape(3)

    normals = np.full((len(cloud), 3), np.nan)
    if indices is None:
        targets = cloud.valid_indices
    else:
        targets = np.unique(np.asarray(indices, dtype=np.int64))
        targets = targets[cloud.valid[targets]]
    if not len(targets) or len(tree) < 3:
        return cloud.replace(normals=normals)

    neighbors = tree.knn_many(cloud.xyz[targets], k)
    normals[targets] = _fit_normals(tree.cloud.xyz[neighbors], cloud.xyz[targets], viewpoint)
    return cloud.replace(normals=normals)


def _fit_normals(patches: np.ndarray, points: np.ndarray, viewpoint: np.ndarray) -> np.ndarray:
    centered = patches - patches.mean(axis=1, keepdims=True)
    cov = np.einsum("nki,nkj->nij", centered, centered) / patches.shape[1]
    values, vectors = np.linalg.eigh(cov)
    normals = vectors[:, :, 0].copy()

    degenerate = values[:, 1] <= RANK_TOLERANCE * np.maximum(values[:, 2], 0)
    degenerate |= values[:, 2] <= 0

    facing = np.einsum("ij,ij->i", normals, viewpoint - points)
    normals[facing < 0] *= -1
    normals[degenerate] = np.nan
    return normals
