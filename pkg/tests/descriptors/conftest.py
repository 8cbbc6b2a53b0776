#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import PointCloud
from boostrec.geometry import estimate_normals
from boostrec.spatial import build_tree


@pytest.fixture(scope="module")
def surface():
    """A bumpy, colored, asymmetric patch with normals, and a tree over it."""
    rng = np.random.default_rng(11)
    xy = rng.uniform(-0.04, 0.04, (1500, 2))
    x, y = xy.T
    z = 0.6 + 2 * x**2 - 1.5 * x * y + 0.003 * np.sin(120 * y) + 0.002 * np.cos(90 * x)
    rgb = rng.integers(0, 256, (1500, 3), dtype=np.uint8)
    cloud = PointCloud(np.column_stack([x, y, z]), rgb=rgb)
    tree = build_tree(cloud)
    return estimate_normals(cloud, tree), tree


@pytest.fixture(scope="module")
def keypoints(surface):
    """Interior points whose supports are complete."""
    cloud, _ = surface
    inner = np.flatnonzero(np.abs(cloud.xyz[:, :2]).max(axis=1) < 0.015)
    return inner[:4]
