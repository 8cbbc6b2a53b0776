#!/usr/bin/python3

from typing import Tuple

import cv2
import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.descriptors.base import (
    Descriptor,
    DescriptorFamily,
    require_color,
    require_normals,
    soft_bins,
)
from boostrec.geometry.lrf import LocalReferenceFrame, compute_lrfs
from boostrec.spatial.kdtree import KdTree3, gather

AZIMUTH_BINS = 8
ELEVATION_BINS = 2
RADIAL_BINS = 2
VOLUMES = AZIMUTH_BINS * ELEVATION_BINS * RADIAL_BINS
COSINE_BINS = 11
COLOR_BINS = 31
SHAPE_LENGTH = VOLUMES * COSINE_BINS


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """CIELab (D65, sRGB gamma) of 8-bit RGB rows: L in [0, 100], a and b in [-128, 127]."""
    scaled = np.asarray(rgb, dtype=np.float32).reshape(-1, 1, 3) / 255.0
    return cv2.cvtColor(scaled, cv2.COLOR_RGB2Lab).reshape(-1, 3).astype(np.float64)


def lab_distance(lab: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """L1 distance of normalized Lab triplets, in [0, 1]."""
    scale = np.array([100.0, 256.0, 256.0])
    return np.abs(lab - reference).dot(1 / scale) / 3


def _spatial_bins(local: np.ndarray, dist: np.ndarray, radius: float) -> list:
    azimuth = np.mod(np.arctan2(local[:, 1], local[:, 0]), 2 * np.pi)
    elevation = np.arcsin(np.clip(local[:, 2] / dist, -1.0, 1.0))
    return [
        soft_bins(azimuth / (2 * np.pi) * AZIMUTH_BINS, AZIMUTH_BINS, cyclic=True),
        soft_bins((elevation + np.pi / 2) / np.pi * ELEVATION_BINS, ELEVATION_BINS, cyclic=False),
        soft_bins(dist / radius * RADIAL_BINS, RADIAL_BINS, cyclic=False),
    ]


def _accumulate(
    target: np.ndarray,
    owner: np.ndarray,
    spatial: list,
    value_bins: tuple,
    bin_count: int,
    offset: int,
) -> None:
    """Quadrilinear accumulation of one histogram channel into ``target`` rows."""
    length = target.shape[1]
    for a in (0, 1):
        for e in (0, 1):
            for r in (0, 1):
                for v in (0, 1):
                    weight = np.ones(len(owner))
                    volume = np.zeros(len(owner), dtype=np.int64)
                    for (low, high, frac), pick, size in zip(
                        spatial, (a, e, r), (AZIMUTH_BINS, ELEVATION_BINS, RADIAL_BINS)
                    ):
                        volume = volume * size + (high if pick else low)
                        weight = weight * (frac if pick else 1 - frac)
                    low, high, frac = value_bins
                    column = offset + volume * bin_count + (high if v else low)
                    weight = weight * (frac if v else 1 - frac)
                    flat = owner * length + column
                    target += np.bincount(flat, weights=weight, minlength=target.size).reshape(
                        target.shape
                    )


def shot_histograms(
    cloud: PointCloud,
    tree: KdTree3,
    indices: np.ndarray,
    frames: np.ndarray,
    radius: float,
    color: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    SHOT (or CSHOT with ``color``) rows for keypoints given as cloud indices with
    precomputed frames (m, 3, 3), axes as rows. NaN frames give zero rows.

    Returns the (m, 352 or 1344) values and a flag per row that is False when
    the support held no usable neighbour.
    """
    normals = require_normals(cloud)
    family = DescriptorFamily.CSHOT if color else DescriptorFamily.SHOT
    rgb = require_color(cloud, family) if color else None
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    values = np.zeros((len(indices), family.length))
    if not len(indices):
        return values, np.zeros(0, dtype=bool)

    centers = cloud.xyz[indices]
    usable = np.isfinite(frames).all(axis=(1, 2)) & np.isfinite(normals[indices]).all(axis=1)
    neighborhoods = tree.radius_many(centers, radius)
    offsets, flat = gather([n if ok else n[:0] for n, ok in zip(neighborhoods, usable)])
    owner = np.repeat(np.arange(len(indices)), np.diff(offsets))

    diffs = cloud.xyz[flat] - centers[owner]
    dist = np.linalg.norm(diffs, axis=1)
    keep = (dist > 0) & np.isfinite(normals[flat]).all(axis=1)
    flat, owner, diffs, dist = flat[keep], owner[keep], diffs[keep], dist[keep]

    if len(flat):
        local = np.einsum("nij,nj->ni", frames[owner], diffs)
        spatial = _spatial_bins(local, dist, radius)
        cosine = np.clip(np.einsum("ij,ij->i", normals[flat], normals[indices][owner]), -1, 1)
        cos_bins = soft_bins((cosine + 1) / 2 * COSINE_BINS, COSINE_BINS, cyclic=False)
        _accumulate(values, owner, spatial, cos_bins, COSINE_BINS, 0)

        if rgb is not None:
            needed = np.unique(np.concatenate([flat, indices]))
            lab = np.zeros((len(cloud), 3))
            lab[needed] = rgb_to_lab(rgb[needed])
            distance = lab_distance(lab[flat], lab[indices][owner])
            color_bins = soft_bins(distance * COLOR_BINS, COLOR_BINS, cyclic=False)
            _accumulate(values, owner, spatial, color_bins, COLOR_BINS, SHAPE_LENGTH)

    norms = np.linalg.norm(values, axis=1)
    valid = norms > 0
    values[valid] /= norms[valid, None]
    return values, valid


def shot_many(
    cloud: PointCloud,
    tree: KdTree3,
    indices: np.ndarray,
    radius: float = 0.05,
    color: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """SHOT/CSHOT rows for many keypoints, computing each keypoint's LRF first."""
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    frames, _ = compute_lrfs(tree, cloud.xyz[indices], radius)
    return shot_histograms(cloud, tree, indices, frames, radius, color)


def shot(
    cloud: PointCloud, tree: KdTree3, keypoint: int, lrf: LocalReferenceFrame, radius: float = 0.05
) -> Descriptor:
    """352-bin SHOT descriptor of the keypoint at index ``keypoint`` of ``cloud``."""
    values, valid = shot_histograms(
        cloud, tree, np.array([keypoint]), lrf.as_matrix()[None], radius, color=False
    )
    return Descriptor(DescriptorFamily.SHOT, values[0], keypoint, bool(valid[0]))


def cshot(
    cloud: PointCloud, tree: KdTree3, keypoint: int, lrf: LocalReferenceFrame, radius: float = 0.05
) -> Descriptor:
    """1344-bin colour SHOT: shape part followed by a CIELab distance part per volume."""
    values, valid = shot_histograms(
        cloud, tree, np.array([keypoint]), lrf.as_matrix()[None], radius, color=True
    )
    return Descriptor(DescriptorFamily.CSHOT, values[0], keypoint, bool(valid[0]))
