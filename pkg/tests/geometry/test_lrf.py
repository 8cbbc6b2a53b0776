#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import PointCloud, RigidTransform, transform_cloud
from boostrec.exceptions import InsufficientNeighbors
from boostrec.geometry import LocalReferenceFrame, compute_lrf, compute_lrfs
from boostrec.spatial import build_tree


@pytest.fixture
def blob(rng):
    return PointCloud(rng.normal(size=(400, 3)) * [0.02, 0.01, 0.005] + [0.1, 0, 0.6])


def test_frame_is_orthonormal(blob):
    frame = compute_lrf(blob, build_tree(blob), blob.xyz[0], 0.05)
    axes = frame.as_matrix()
    assert np.allclose(axes @ axes.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(axes) == pytest.approx(1.0)


def test_rotation_repeatability(blob, rng):
    transform = RigidTransform.random(rng, max_translation=0.5)
    moved = transform_cloud(blob, transform)
    for index in (0, 5, 17):
        before = compute_lrf(blob, build_tree(blob), blob.xyz[index], 0.05).as_matrix()
        after = compute_lrf(moved, build_tree(moved), moved.xyz[index], 0.05).as_matrix()
        assert np.allclose(after, before @ transform.rotation.T, atol=1e-6)


def test_plane_tie_points_z_up(plane):
    frame = compute_lrf(plane, build_tree(plane), [0, 0, 0.6], 0.03)
    assert np.allclose(frame.z, [0, 0, 1])


def test_insufficient_neighbors(plane):
    tree = build_tree(plane)
    with pytest.raises(InsufficientNeighbors) as exc:
        compute_lrf(plane, tree, [-0.05, -0.05, 0.6], 0.0075)
    assert exc.value.found == 4
    with pytest.raises(ValueError):
        compute_lrf(plane, tree, [0, 0, 0.6], 0)


def test_batch_matches_single(blob):
    tree = build_tree(blob)
    centers = np.vstack([blob.xyz[:6], [[5, 5, 5]]])
    frames, ok = compute_lrfs(tree, centers, 0.05)
    assert ok.tolist() == [True] * 6 + [False]
    assert np.isnan(frames[6]).all()
    for center, frame in zip(centers[:6], frames[:6]):
        single = compute_lrf(blob, tree, center, 0.05).as_matrix()
        assert np.allclose(frame, single, atol=1e-12)


def test_batch_empty(blob):
    frames, ok = compute_lrfs(build_tree(blob), np.empty((0, 3)), 0.05)
    assert frames.shape == (0, 3, 3) and ok.shape == (0,)


def test_frame_validation():
    LocalReferenceFrame.from_matrix(np.eye(3))
    with pytest.raises(ValueError, match="right-handed"):
        LocalReferenceFrame.from_matrix(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError, match="orthonormal"):
        LocalReferenceFrame.from_matrix(np.eye(3) * 2)
