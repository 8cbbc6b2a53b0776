#!/usr/bin/python3

import numpy as np
import pytest

from boostrec.cloud import CloudFormat, PointCloud, load_cloud, save_cloud
from boostrec.exceptions import CloudFormatError

ASCII_HEADER = """# .PCD v0.7 - Point Cloud Data file format
VERSION 0.7
FIELDS x y z
SIZE 4 4 4
TYPE F F F
COUNT 1 1 1
WIDTH 2
HEIGHT 1
POINTS 2
DATA ascii
"""


@pytest.fixture
def full_cloud(organized):
    normals = np.tile([0.0, 0.6, 0.8], (12, 1))
    normals[3] = np.nan
    return organized.replace(normals=normals)


def _same(a, b, atol=0.0):
    assert (a.width, a.height) == (b.width, b.height)
    assert np.allclose(a.xyz, b.xyz, rtol=0, atol=atol, equal_nan=True)
    assert a.rgb.tolist() == b.rgb.tolist()
    assert np.allclose(a.normals, b.normals, rtol=0, atol=atol, equal_nan=True)


def test_binary_pcd_is_exact(full_cloud, tmp_path):
    path = save_cloud(full_cloud, tmp_path.joinpath("scene.pcd"))
    loaded = load_cloud(path)
    _same(full_cloud, loaded)
    assert np.array_equal(loaded.xyz, full_cloud.xyz, equal_nan=True)


def test_ascii_pcd(full_cloud, tmp_path):
    path = save_cloud(full_cloud, tmp_path.joinpath("scene.pcd"), "pcd-ascii")
    assert b"DATA ascii" in path.read_bytes()
    assert b"nan" in path.read_bytes()
    _same(full_cloud, load_cloud(path), atol=1e-6)


def test_ply(full_cloud, tmp_path):
    path = save_cloud(full_cloud, tmp_path.joinpath("scene.ply"))
    assert path.read_bytes().startswith(b"ply\nformat ascii 1.0\ncomment organized 4 3\n")
    _same(full_cloud, load_cloud(path), atol=1e-6)


def test_format_from_path():
    assert CloudFormat.from_path("a/b.PLY") == CloudFormat.PLY_ASCII
    assert CloudFormat.from_path("a/b.pcd") == CloudFormat.PCD_BINARY


def test_plain_unorganized(plane, tmp_path):
    loaded = load_cloud(save_cloud(plane, tmp_path.joinpath("plane.pcd"), CloudFormat.PCD_ASCII))
    assert not loaded.is_organized
    assert loaded.rgb is None and loaded.normals is None
    assert np.allclose(loaded.xyz, plane.xyz, atol=1e-7)


def test_empty_cloud(tmp_path):
    empty = PointCloud(np.zeros((0, 3)))
    assert len(load_cloud(save_cloud(empty, tmp_path.joinpath("empty.pcd")))) == 0


def test_float32_packed_rgb(tmp_path):
    header = ASCII_HEADER.replace("x y z", "x y z rgb").replace("4 4 4", "4 4 4 4")
    header = header.replace("F F F", "F F F F").replace("1 1 1", "1 1 1 1")
    header = header.replace("DATA ascii", "DATA binary")
    dtype = np.dtype([("x", "<f4"), ("y", "<f4"), ("z", "<f4"), ("rgb", "<f4")])
    records = np.zeros(2, dtype=dtype)
    records["z"] = [0.5, 0.75]
    records["rgb"] = np.array([0x00FF8010, 0x00010203], dtype="<u4").view("<f4")
    path = tmp_path.joinpath("pcl.pcd")
    path.write_bytes(header.encode() + records.tobytes())

    cloud = load_cloud(path)
    assert cloud.xyz[:, 2].tolist() == [0.5, 0.75]
    assert cloud.rgb.tolist() == [[255, 128, 16], [1, 2, 3]]


def test_missing_file(tmp_path):
    with pytest.raises(CloudFormatError, match="unreadable"):
        load_cloud(tmp_path.joinpath("nothing.pcd"))


def test_short_row(tmp_path):
    path = tmp_path.joinpath("bad.pcd")
    path.write_text(ASCII_HEADER + "0 0 1\n0.5 0.25\n")
    with pytest.raises(CloudFormatError) as exc:
        load_cloud(path)
    assert exc.value.location == "line 12"


def test_missing_rows(tmp_path):
    path = tmp_path.joinpath("bad.pcd")
    path.write_text(ASCII_HEADER + "0 0 1\n")
    with pytest.raises(CloudFormatError, match="expected 2 points, found 1"):
        load_cloud(path)


def test_truncated_binary(tmp_path):
    path = tmp_path.joinpath("bad.pcd")
    path.write_bytes(ASCII_HEADER.replace("ascii", "binary").encode() + bytes(12))
    with pytest.raises(CloudFormatError, match="expected 24 bytes"):
        load_cloud(path)


@pytest.mark.parametrize(
    "old,new,message",
    [
        ("VERSION 0.7", "VERSION 0.5", "unsupported PCD version"),
        ("VERSION 0.7", "COLOUR 1", "unknown header entry"),
        ("SIZE 4 4 4", "SIZE 4 4", "SIZE lists 2 entries"),
        ("TYPE F F F", "TYPE F F X", "unsupported field type"),
        ("WIDTH 2", "WIDTH two", "expected an integer"),
        ("POINTS 2", "POINTS 3", "does not match"),
        ("DATA ascii", "DATA binary_compressed", "compressed"),
        ("FIELDS x y z", "FIELDS x y w", "missing 'z'"),
    ],
)
def test_malformed_pcd_header(tmp_path, old, new, message):
    path = tmp_path.joinpath("bad.pcd")
    path.write_text(ASCII_HEADER.replace(old, new) + "0 0 1\n0 0 2\n")
    with pytest.raises(CloudFormatError, match=message) as exc:
        load_cloud(path)
    assert exc.value.location.startswith("line")


def test_header_without_data(tmp_path):
    path = tmp_path.joinpath("bad.pcd")
    path.write_text(ASCII_HEADER.split("DATA")[0])
    with pytest.raises(CloudFormatError, match="header ends"):
        load_cloud(path)


@pytest.mark.parametrize(
    "header,message",
    [
        ("ply\nformat binary_little_endian 1.0\nelement vertex 1\n", "only ASCII"),
        ("ply\nformat ascii 1.0\nproperty float x\n", "property before any element"),
        ("ply\nformat ascii 1.0\nelement vertex 1\nproperty list uchar int x\n", "list"),
        ("ply\nformat ascii 1.0\nelement face 1\nproperty uchar x\n", "no vertex element"),
        ("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n", "no 'y' property"),
    ],
)
def test_malformed_ply(tmp_path, header, message):
    path = tmp_path.joinpath("bad.ply")
    path.write_text(header + "end_header\n1\n")
    with pytest.raises(CloudFormatError, match=message):
        load_cloud(path)


def test_ply_without_end_header(tmp_path):
    path = tmp_path.joinpath("bad.ply")
    path.write_text("ply\nformat ascii 1.0\n")
    with pytest.raises(CloudFormatError, match="end_header"):
        load_cloud(path)
