#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import PointCloud
from boostrec.keypoints import iss_detect
from boostrec.spatial import build_tree


def _oracle(xyz, salient_radius, nms_radius, gamma21, gamma32, min_neighbors):
    count = len(xyz)
    dist = np.linalg.norm(xyz[:, None, :] - xyz[None, :, :], axis=2)
    neighbors = [np.flatnonzero(dist[i] <= salient_radius) for i in range(count)]
    weight = np.array([1.0 / len(n) for n in neighbors])
    l3 = np.full(count, -np.inf)
    for i in range(count):
        if len(neighbors[i]) < min_neighbors:
            continue
        scatter = np.zeros((3, 3))
        for j in neighbors[i]:
            diff = xyz[j] - xyz[i]
            scatter += weight[j] * np.outer(diff, diff)
        scatter /= weight[neighbors[i]].sum()
        e3, e2, e1 = np.linalg.eigvalsh(scatter)
        if e2 < gamma21 * e1 and e3 < gamma32 * e2 and e3 > 1e-10 * e1:
            l3[i] = e3
    keep = []
    for i in np.flatnonzero(np.isfinite(l3)):
        rivals = np.flatnonzero(dist[i] <= nms_radius)
        if all(l3[j] < l3[i] or (l3[j] == l3[i] and j >= i) for j in rivals):
            keep.append(i)
    return keep


def test_matches_oracle(rng):
    xyz = rng.normal(size=(300, 3)) * [0.02, 0.015, 0.01]
    cloud = PointCloud(xyz)
    keypoints = iss_detect(cloud, salient_radius=0.012, nms_radius=0.008)
    expected = _oracle(xyz, 0.012, 0.008, 0.975, 0.975, 5)
    assert len(expected) > 0
    assert keypoints.indices.tolist() == expected


def test_plane_has_no_keypoints(plane):
    keypoints = iss_detect(plane, build_tree(plane))
    assert len(keypoints) == 0
    assert keypoints.detector == "iss"


def test_keypoints_are_separated(sphere):
    keypoints = iss_detect(sphere, salient_radius=0.012, nms_radius=0.008)
    assert len(keypoints) > 0
    positions = keypoints.positions
    dist = np.linalg.norm(positions[:, None] - positions[None, :], axis=2)
    np.fill_diagonal(dist, np.inf)
    assert dist.min() > 0.008


def test_invalid_points_are_ignored(rng):
    xyz = rng.normal(size=(200, 3)) * 0.01
    with_nan = np.vstack([np.full((5, 3), np.nan), xyz])
    plain = iss_detect(PointCloud(xyz))
    padded = iss_detect(PointCloud(with_nan))
    assert (padded.indices - 5).tolist() == plain.indices.tolist()


def test_params_are_recorded(plane):
    keypoints = iss_detect(plane, salient_radius=0.02, nms_radius=0.01, gamma21=0.9)
    assert keypoints.params["salient_radius"] == 0.02
    assert keypoints.params["gamma21"] == 0.9


def test_degenerate_inputs():
    assert len(iss_detect(PointCloud(np.full((4, 3), np.nan)))) == 0
    with pytest.raises(ValueError):
        iss_detect(PointCloud([[0, 0, 0]]), salient_radius=0)
