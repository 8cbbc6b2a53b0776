#!/usr/bin/python3

from typing import Tuple

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.descriptors.base import (
    Descriptor,
    DescriptorFamily,
    hard_bins,
    require_color,
    require_normals,
)
from boostrec.exceptions import SingletonSupport
from boostrec.geometry.pairs import pair_features_batch
from boostrec.spatial.kdtree import KdTree3, gather

FPFH_BINS = 11
PFHRGB_BINS = 5
# channel floor keeping colour ratios finite
MIN_CHANNEL = 1 / 255
HISTOGRAM_MASS = 100.0


def _neighbor_pairs(
    cloud: PointCloud, tree: KdTree3, indices: np.ndarray, radius: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(owner row, neighbour index, distance) for every usable neighbour of each
    index: valid normal and not coincident with the query point."""
    normals = cloud.normals
    centers = cloud.xyz[indices]
    offsets, flat = gather(tree.radius_many(centers, radius))
    owner = np.repeat(np.arange(len(indices)), np.diff(offsets))
    dist = np.linalg.norm(cloud.xyz[flat] - centers[owner], axis=1)
    keep = (dist > 0) & np.isfinite(normals[flat]).all(axis=1)
    keep &= np.isfinite(normals[indices][owner]).all(axis=1)
    return owner[keep], flat[keep], dist[keep]


def _fpfh_columns(cos_alpha: np.ndarray, cos_phi: np.ndarray, theta: np.ndarray) -> list:
    return [
        hard_bins(cos_alpha, -1.0, 1.0, FPFH_BINS),
        FPFH_BINS + hard_bins(cos_phi, -1.0, 1.0, FPFH_BINS),
        2 * FPFH_BINS + hard_bins(theta, -np.pi, np.pi, FPFH_BINS),
    ]


def spfh_many(cloud: PointCloud, tree: KdTree3, indices: np.ndarray, radius: float) -> np.ndarray:
    """
    Simplified point feature histograms (n, 33) of the given points.

    Each 11-bin block histograms one pair feature (cos alpha, cos phi, theta)
    over the pairs formed with the neighbours in ``radius``, each pair adding
    100 / pairs so a non-empty block sums to 100.
    """
    normals = require_normals(cloud)
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    hist = np.zeros((len(indices), 3 * FPFH_BINS))
    if not len(indices):
        return hist
    owner, neighbor, _ = _neighbor_pairs(cloud, tree, indices, radius)
    source = indices[owner]
    pairs = pair_features_batch(
        cloud.xyz[source], normals[source], cloud.xyz[neighbor], normals[neighbor]
    )
    owner = owner[pairs.valid]
    counts = np.bincount(owner, minlength=len(indices)).astype(np.float64)
    increment = HISTOGRAM_MASS / np.maximum(counts, 1)
    columns = _fpfh_columns(
        np.cos(pairs.alpha[pairs.valid]), np.cos(pairs.phi[pairs.valid]), pairs.theta[pairs.valid]
    )
    for column in columns:
        flat = owner * hist.shape[1] + column
        hist += np.bincount(flat, weights=increment[owner], minlength=hist.size).reshape(
            hist.shape
        )
    return hist


def normalize_blocks(hist: np.ndarray, block: int, mass: float = HISTOGRAM_MASS) -> np.ndarray:
    """Scales each ``block``-wide sub-histogram of every row to sum ``mass``, empty ones stay 0."""
    shaped = hist.reshape(len(hist), -1, block)
    sums = shaped.sum(axis=2, keepdims=True)
    scaled = np.divide(shaped * mass, sums, out=np.zeros_like(shaped), where=sums > 0)
    return scaled.reshape(hist.shape)


def fpfh_many(
    cloud: PointCloud,
    tree: KdTree3,
    indices: np.ndarray,
    radius: float = 0.05,
    normalize: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    FPFH rows (m, 33): SPFH(p) + (1/K) * sum(SPFH(p_k) / |p - p_k|) over the K
    usable neighbours of p. With ``normalize`` each block is rescaled to sum 100.
    Keypoints without neighbours give zero rows flagged False.
    """
    require_normals(cloud)
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    values = np.zeros((len(indices), 3 * FPFH_BINS))
    if not len(indices):
        return values, np.zeros(0, dtype=bool)

    owner, neighbor, dist = _neighbor_pairs(cloud, tree, indices, radius)
    needed, inverse = np.unique(np.concatenate([indices, neighbor]), return_inverse=True)
    spfh = spfh_many(cloud, tree, needed, radius)
    own = spfh[inverse[: len(indices)]]
    others = spfh[inverse[len(indices) :]]

    counts = np.bincount(owner, minlength=len(indices)).astype(np.float64)
    weighted = np.zeros_like(values)
    np.add.at(weighted, owner, others / dist[:, None])
    valid = counts > 0
    values[valid] = own[valid] + weighted[valid] / counts[valid, None]
    if normalize:
        values = normalize_blocks(values, FPFH_BINS)
    return values, valid


def fpfh(cloud: PointCloud, tree: KdTree3, keypoint: int, radius: float = 0.05) -> Descriptor:
    """33-bin FPFH descriptor of the keypoint at index ``keypoint`` of ``cloud``."""
    values, valid = fpfh_many(cloud, tree, np.array([keypoint]), radius)
    return Descriptor(DescriptorFamily.FPFH, values[0], keypoint, bool(valid[0]))


def _pfhrgb_row(
    xyz: np.ndarray, normals: np.ndarray, colors: np.ndarray
) -> Tuple[np.ndarray, bool]:
    first, second = np.triu_indices(len(xyz), 1)
    pairs = pair_features_batch(xyz[first], normals[first], xyz[second], normals[second])
    valid = pairs.valid
    if not valid.any():
        return np.zeros(2 * PFHRGB_BINS**3), False

    geometric = (
        hard_bins(np.cos(pairs.alpha[valid]), -1.0, 1.0, PFHRGB_BINS) * PFHRGB_BINS**2
        + hard_bins(np.cos(pairs.phi[valid]), -1.0, 1.0, PFHRGB_BINS) * PFHRGB_BINS
        + hard_bins(pairs.theta[valid], -np.pi, np.pi, PFHRGB_BINS)
    )
    swapped = pairs.swapped[valid]
    first, second = first[valid], second[valid]
    source = np.where(swapped, second, first)
    target = np.where(swapped, first, second)
    ratio = colors[source] / colors[target]
    squashed = hard_bins(ratio / (1 + ratio), 0.0, 1.0, PFHRGB_BINS)
    chromatic = (
        squashed[:, 0] * PFHRGB_BINS**2 + squashed[:, 1] * PFHRGB_BINS + squashed[:, 2]
    )

    size = PFHRGB_BINS**3
    increment = HISTOGRAM_MASS / valid.sum()
    row = np.concatenate(
        [
            np.bincount(geometric, minlength=size) * increment,
            np.bincount(chromatic, minlength=size) * increment,
        ]
    )
    return row, True


def pfhrgb_many(
    cloud: PointCloud, tree: KdTree3, indices: np.ndarray, radius: float = 0.05
) -> Tuple[np.ndarray, np.ndarray]:
    """
    PFHRGB rows (m, 250) over all point pairs of {keypoint} and its neighbours:
    a joint 5x5x5 histogram of (cos alpha, cos phi, theta) followed by a joint
    5x5x5 histogram of the per-channel colour ratios source/target, each ratio
    squashed through r / (1 + r). Each half sums to 100.
    """
    normals = require_normals(cloud)
    colors = np.maximum(require_color(cloud, DescriptorFamily.PFHRGB) / 255.0, MIN_CHANNEL)
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    values = np.zeros((len(indices), 2 * PFHRGB_BINS**3))
    valid = np.zeros(len(indices), dtype=bool)
    if not len(indices):
        return values, valid

    owner, neighbor, _ = _neighbor_pairs(cloud, tree, indices, radius)
    splits = np.cumsum(np.bincount(owner, minlength=len(indices)))[:-1]
    for row, (index, support) in enumerate(zip(indices, np.split(neighbor, splits))):
        if not len(support):
            continue
        members = np.concatenate([[index], support])
        values[row], valid[row] = _pfhrgb_row(
            cloud.xyz[members], normals[members], colors[members]
        )
    return values, valid


def pfhrgb(cloud: PointCloud, tree: KdTree3, keypoint: int, radius: float = 0.05) -> Descriptor:
    """250-bin PFHRGB descriptor of the keypoint at index ``keypoint`` of ``cloud``."""
    require_color(cloud, DescriptorFamily.PFHRGB)
    values, valid = pfhrgb_many(cloud, tree, np.array([keypoint]), radius)
    if not valid[0]:
        raise SingletonSupport(
            f"Keypoint {keypoint} has no usable neighbour within {radius} m to pair with"
        )
    return Descriptor(DescriptorFamily.PFHRGB, values[0], keypoint, True)
