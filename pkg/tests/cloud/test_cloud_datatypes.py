#!/usr/bin/python3

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boostrec.cloud import (
    Aabb,
    Point3,
    PointCloud,
    RigidTransform,
    as_xyz,
    bounding_box,
    compact,
    transform_cloud,
)
from boostrec.exceptions import EmptyCloudError, UnorganizedCloudError

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_organized_index(organized):
    assert organized.is_organized
    assert organized.index(1, 1) == 5
    assert organized.index(2, 3) == 11
    assert not organized.valid[organized.index(1, 2)]
    assert not organized.dense


def test_index_out_of_bounds(organized):
    with pytest.raises(IndexError):
        organized.index(3, 0)
    with pytest.raises(IndexError):
        organized.index(0, -1)


def test_unorganized_has_no_pixels(plane):
    assert not plane.is_organized
    assert plane.width == len(plane) and plane.height == 1
    with pytest.raises(UnorganizedCloudError):
        plane.index(0, 0)
    with pytest.raises(UnorganizedCloudError):
        plane.image()


def test_partial_nan_invalidates_point():
    cloud = PointCloud([[0, 0, 1], [np.nan, 0.2, 1]])
    assert np.isnan(cloud.xyz[1]).all()
    assert cloud.valid.tolist() == [True, False]
    assert cloud.valid_indices.tolist() == [0]


def test_layout_mismatch():
    with pytest.raises(ValueError):
        PointCloud(np.zeros((6, 3)), width=4, height=2)
    with pytest.raises(ValueError):
        PointCloud(np.zeros((4, 3)), rgb=np.zeros((3, 3)))


def test_arrays_are_read_only(organized):
    with pytest.raises(ValueError):
        organized.xyz[0, 0] = 1.0
    with pytest.raises(ValueError):
        organized.rgb[0, 0] = 1


def test_point_access(organized):
    point = organized.point(5)
    assert point.valid
    assert point.rgb == (15, 16, 17)
    assert np.allclose(point.as_array(), [0.01, 0.01, 0.5])
    assert not organized.point(6).valid


def test_point3_validation():
    assert not Point3(np.nan, np.nan, np.nan).valid
    with pytest.raises(ValueError):
        Point3(0.0, np.nan, 1.0)
    with pytest.raises(ValueError):
        Point3(0.0, 0.0, 1.0, normal=(0.0, 0.0, 2.0))
    with pytest.raises(ValueError):
        Point3(0.0, 0.0, 1.0, rgb=(0, 0, 256))


def test_as_xyz():
    assert as_xyz(Point3(1.0, 2.0, 3.0)).tolist() == [1, 2, 3]
    assert as_xyz([[1, 2, 3]]).shape == (3,)
    with pytest.raises(ValueError):
        as_xyz([1, 2])


def test_normals_are_cleaned():
    normals = [[0, 0, 2], [0, 0, 0], [3, 4, 0]]
    cloud = PointCloud(np.zeros((3, 3)), normals=normals)
    assert np.allclose(cloud.normals[0], [0, 0, 1])
    assert np.isnan(cloud.normals[1]).all()
    assert np.allclose(cloud.normals[2], [0.6, 0.8, 0])
    assert cloud.point(1).normal is None


def test_image(organized):
    image = organized.image()
    assert image.shape == (3, 4, 3)
    assert image[0, 1].tolist() == organized.rgb[1].tolist()
    assert not organized.replace(rgb=None).image().any()


def test_subset_provenance_chains(organized):
    first = organized.subset([11, 5, 0])
    assert not first.is_organized
    assert first.provenance.tolist() == [11, 5, 0]
    second = first.subset([1, 2])
    assert second.provenance.tolist() == [5, 0]
    assert second.rgb.tolist() == organized.rgb[[5, 0]].tolist()


def test_compact(organized):
    cloud = compact(organized)
    assert len(cloud) == 11
    assert cloud.provenance.tolist() == [0, 1, 2, 3, 4, 5, 7, 8, 9, 10, 11]
    keep = np.zeros(12, dtype=bool)
    keep[[0, 6, 7]] = True
    assert compact(organized, keep).provenance.tolist() == [0, 7]


def test_from_matrix():
    matrix = RigidTransform.from_euler((10, 20, 30), (0.1, 0.2, 0.3)).as_matrix()
    assert np.allclose(RigidTransform.from_matrix(matrix).as_matrix(), matrix)
    assert np.allclose(RigidTransform.from_matrix(matrix[:3].ravel()).as_matrix(), matrix)
    matrix[3, 0] = 1
    with pytest.raises(ValueError):
        RigidTransform.from_matrix(matrix)
    with pytest.raises(ValueError):
        RigidTransform.from_matrix(np.eye(3))


def test_invalid_rotation():
    with pytest.raises(ValueError):
        RigidTransform(np.eye(3) * 2)
    with pytest.raises(ValueError):
        RigidTransform(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ValueError):
        RigidTransform(np.eye(3), [0, np.inf, 0])


@given(seed=seeds)
def test_inverse_and_compose(seed):
    rng = np.random.default_rng(seed)
    a = RigidTransform.random(rng)
    b = RigidTransform.random(rng)
    points = rng.uniform(-1, 1, (10, 3))

    assert np.allclose(a.compose(b).apply(points), a.apply(b.apply(points)), atol=1e-12)
    assert np.allclose(a.inverse().apply(a.apply(points)), points, atol=1e-12)
    assert a.compose(a.inverse()).rotation_error(RigidTransform.identity()) < 1e-6


def test_errors():
    turned = RigidTransform.from_euler((0, 0, 90), (0.3, 0.4, 0))
    assert turned.rotation_error(RigidTransform()) == pytest.approx(np.pi / 2)
    assert turned.translation_error(RigidTransform()) == pytest.approx(0.5)


def test_transform_cloud(organized):
    transform = RigidTransform.from_euler((0, 90, 0), (1, 0, 0))
    cloud = organized.replace(normals=np.tile([0.0, 0.0, 1.0], (12, 1)))
    moved = transform_cloud(cloud, transform)
    assert (moved.width, moved.height) == (4, 3)
    assert np.isnan(moved.xyz[6]).all()
    assert np.allclose(moved.xyz[0], transform.apply(cloud.xyz[0]))
    assert np.allclose(moved.normals[0], [1, 0, 0])
    assert moved.rgb.tolist() == cloud.rgb.tolist()


def test_aabb():
    box = Aabb([0, 0, 0], [2, 1, 1])
    other = Aabb([1, 0, 0], [3, 1, 1])
    assert box.volume == 2
    assert box.intersection_volume(other) == 1
    assert box.overlaps(other)
    assert not box.overlaps(box.shifted([5, 0, 0]))
    assert box.intersection_volume(box.shifted([5, 0, 0])) == 0
    assert box.shifted([1, 0, 0]) == other
    with pytest.raises(ValueError):
        Aabb([1, 0, 0], [0, 1, 1])


def test_bounding_box(organized):
    box = bounding_box(organized)
    assert np.allclose(box.min, [0, 0, 0.5])
    assert np.allclose(box.max, [0.03, 0.02, 0.5])
    with pytest.raises(EmptyCloudError):
        bounding_box(PointCloud([[np.nan, np.nan, np.nan]]))
