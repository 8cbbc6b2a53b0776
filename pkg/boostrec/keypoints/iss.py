#!/usr/bin/python3

from typing import Optional, Tuple

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.keypoints.datatypes import KeypointSet
from boostrec.spatial.kdtree import KdTree3, build_tree, gather

# a smallest eigenvalue below this fraction of the largest counts as zero (flat patch)
FLAT_TOLERANCE = 1e-10


def iss_eigenvalues(
    cloud: PointCloud, tree: KdTree3, salient_radius: float, min_neighbors: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Descending eigenvalues (n, 3) of the density-weighted scatter matrix of each
    valid point, and the indices of those points. Points with fewer than
    ``min_neighbors`` neighbours get NaN rows.
    """
    valid = cloud.valid_indices
    points = cloud.xyz[valid]
    neighborhoods = tree.radius_many(points, salient_radius)
    sizes = np.array([len(i) for i in neighborhoods], dtype=np.int64)

    # density weight of a point is the inverse size of its own neighbourhood
    density = np.zeros(len(cloud), dtype=np.float64)
    density[valid] = 1.0 / np.maximum(sizes, 1)

    values = np.full((len(valid), 3), np.nan)
    ok = sizes >= max(min_neighbors, 1)
    if not ok.any():
        return values, valid

    offsets, flat = gather([n for n, good in zip(neighborhoods, ok) if good])
    owner = np.repeat(np.flatnonzero(ok), np.diff(offsets))
    diffs = cloud.xyz[flat] - points[owner]
    weights = density[flat]
    starts = offsets[:-1]
    scatter = np.add.reduceat(np.einsum("n,ni,nj->nij", weights, diffs, diffs), starts, axis=0)
    scatter /= np.add.reduceat(weights, starts)[:, None, None]
    values[ok] = np.linalg.eigvalsh(scatter)[:, ::-1]
    return values, valid


def iss_detect(
    cloud: PointCloud,
    tree: Optional[KdTree3] = None,
    salient_radius: float = 0.01,
    nms_radius: float = 0.006,
    gamma21: float = 0.975,
    gamma32: float = 0.975,
    min_neighbors: int = 5,
) -> KeypointSet:
    """
    Intrinsic Shape Signatures keypoints.

    A point is a candidate when l2/l1 < gamma21 and l3/l2 < gamma32 for the
    eigenvalues l1 >= l2 >= l3 of its scatter matrix and l3 is not zero; it is
    kept when its l3 is the strict maximum among the candidates within
    ``nms_radius``, equal values going to the lowest index.
    """
    if salient_radius <= 0 or nms_radius <= 0:
        raise ValueError("ISS radii must be positive")
    params = dict(
        salient_radius=salient_radius,
        nms_radius=nms_radius,
        gamma21=gamma21,
        gamma32=gamma32,
        min_neighbors=min_neighbors,
    )
    if not cloud.valid.any():
        return KeypointSet.from_indices(cloud, [], "iss", **params)
    if tree is None:
        tree = build_tree(cloud)

    values, valid = iss_eigenvalues(cloud, tree, salient_radius, min_neighbors)
    l1, l2, l3 = values.T
    with np.errstate(invalid="ignore", divide="ignore"):
        candidate = (l2 < gamma21 * l1) & (l3 < gamma32 * l2) & (l3 > FLAT_TOLERANCE * l1)
    candidate &= np.isfinite(l3)
    if not candidate.any():
        return KeypointSet.from_indices(cloud, [], "iss", **params)

    cand_index = valid[candidate]
    keep = suppress_non_maxima(cloud, tree, cand_index, l3[candidate], nms_radius)
    return KeypointSet.from_indices(cloud, keep, "iss", **params)


def suppress_non_maxima(
    cloud: PointCloud, tree: KdTree3, indices: np.ndarray, scores: np.ndarray, radius: float
) -> np.ndarray:
    """Keeps the indices whose score is the strict maximum among the scored indices
    within ``radius``; equal scores go to the lowest index."""
    saliency = np.full(len(cloud), -np.inf)
    saliency[indices] = scores
    keep = []
    for index, competitors in zip(indices, tree.radius_many(cloud.xyz[indices], radius)):
        own = saliency[index]
        rival = saliency[competitors]
        beaten = (rival > own) | ((rival == own) & (competitors < index))
        if not beaten.any():
            keep.append(index)
    return np.array(keep, dtype=np.int64)
