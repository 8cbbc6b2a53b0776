#!/usr/bin/python3

import json

import numpy as np
import pytest

from boostrec.cloud import RigidTransform
from boostrec.descriptors import DescriptorFamily, DescriptorSet
from boostrec.exceptions import (
    DatabaseFormatError,
    DescriptorFamilyMismatch,
    DuplicateView,
    EmptyIndex,
)
from boostrec.keypoints import KeypointSet
from boostrec.recognition import ModelView, build_database, load_database, save_database


def descriptor_set(rng, count, family="fpfh", valid=None):
    family = DescriptorFamily(family)
    values = rng.random((count, family.length))
    if family.unit_norm:
        values /= np.linalg.norm(values, axis=1)[:, None]
    if valid is None:
        valid = np.ones(count, dtype=bool)
    values[~np.asarray(valid)] = 0
    return DescriptorSet(family, values, np.arange(count), rng.random((count, 3)), valid)


@pytest.fixture
def db(rng):
    transform = RigidTransform.from_euler((0, 30, 0), (0, 0, -0.6))
    return build_database(
        [
            ("mug", "front", None, descriptor_set(rng, 5), transform),
            ("mug", "back", None, descriptor_set(rng, 3)),
            ("bowl", "top", None, descriptor_set(rng, 4)),
        ]
    )


def test_build(db):
    assert len(db) == 12
    assert db.family == DescriptorFamily.FPFH
    assert db.model_ids == ["bowl", "mug"]
    assert len(db.views) == 3
    assert len(db.view("mug", "back")) == 3
    assert repr(db) == "<ModelDatabase fpfh 2 models, 3 views, 12 descriptors>"
    view = db.view("mug", "front")
    assert np.array_equal(db.keypoint("mug", "front", 2), view.positions[2])
    assert np.allclose(view.transform.translation, [0, 0, -0.6])
    assert db.view("mug", "back").transform.translation.tolist() == [0, 0, 0]


def test_provenance_is_sorted(db):
    provenance = db.index.provenance
    assert provenance == sorted(provenance)
    assert provenance[0] == ("bowl", "top", 0)
    row = provenance.index(("mug", "front", 4))
    assert np.array_equal(db.index.vectors[row], db.view("mug", "front").descriptors.values[4])


def test_unknown_view(db):
    with pytest.raises(KeyError, match="bowl"):
        db.view("bowl", "side")


def test_keypoint_positions(rng):
    descriptors = descriptor_set(rng, 4)
    positions = rng.random((4, 3))
    keypoints = KeypointSet(np.arange(10, 14), positions, "iss")

    from_array = build_database([("m", "v", positions, descriptors)])
    from_set = build_database([("m", "v", keypoints, descriptors)])

    assert np.array_equal(from_array.view("m", "v").positions, positions)
    assert np.array_equal(from_set.view("m", "v").positions, positions)
    with pytest.raises(ValueError, match="3 keypoints but 4 descriptors"):
        build_database([("m", "v", positions[:3], descriptors)])


def test_model_view_entries(rng):
    view = ModelView("m", 0, descriptor_set(rng, 2))
    db = build_database([view])
    assert db.view("m", "0") is view
    assert view.key == ("m", "0")


def test_invalid_rows_are_dropped(rng):
    descriptors = descriptor_set(rng, 4, valid=[True, False, True, False])
    db = build_database([("m", "v", None, descriptors)])
    view = db.view("m", "v")
    assert len(view) == 2
    assert len(db) == 2
    assert view.descriptors.indices.tolist() == [0, 2]
    assert np.array_equal(view.positions, descriptors.positions[[0, 2]])


def test_duplicate_view(rng):
    with pytest.raises(DuplicateView):
        build_database(
            [("m", "v", None, descriptor_set(rng, 2)), ("m", "v", None, descriptor_set(rng, 3))]
        )


def test_mixed_families(rng):
    with pytest.raises(DescriptorFamilyMismatch):
        build_database(
            [
                ("m", "a", None, descriptor_set(rng, 2)),
                ("m", "b", None, descriptor_set(rng, 2, "shot")),
            ]
        )


def test_no_views():
    with pytest.raises(EmptyIndex):
        build_database([])


@pytest.mark.parametrize("family", ["shot", "cshot", "fpfh", "pfhrgb"])
def test_save_load(tmp_path, rng, family):
    transform = RigidTransform.from_euler((15, -10, 80), (0.01, 0.02, -0.6))
    db = build_database(
        [
            ("mug", "front", None, descriptor_set(rng, 6, family), transform),
            ("bowl", "top", None, descriptor_set(rng, 2, family)),
        ]
    )
    save_database(db, tmp_path.joinpath("db"))
    loaded = load_database(tmp_path.joinpath("db"))

    assert loaded.family == db.family
    assert sorted(loaded.views) == sorted(db.views)
    for key, view in db.views.items():
        other = loaded.views[key]
        assert np.array_equal(other.descriptors.values, view.descriptors.values)
        assert np.array_equal(other.positions, view.positions)
        assert np.allclose(other.transform.as_matrix(), view.transform.as_matrix())
    assert loaded.index.provenance == db.index.provenance


def test_manifest_layout(tmp_path, db):
    path = save_database(db, tmp_path)
    manifest = json.loads(path.joinpath("manifest.json").read_text())
    assert manifest["family"] == "fpfh"
    assert [(i["model"], i["view"]) for i in manifest["views"]] == [
        ("mug", "front"),
        ("mug", "back"),
        ("bowl", "top"),
    ]
    for entry in manifest["views"]:
        assert path.joinpath(entry["descriptors"]).is_file()
        assert path.joinpath(entry["keypoints"]).is_file()
    assert path.joinpath("view0000.desc").read_bytes()[:8] == b"BRECDESC"


def _edit_manifest(path, change):
    manifest = json.loads(path.joinpath("manifest.json").read_text())
    change(manifest)
    path.joinpath("manifest.json").write_text(json.dumps(manifest))


def test_missing_manifest(tmp_path):
    with pytest.raises(DatabaseFormatError, match="manifest.json"):
        load_database(tmp_path)


def test_broken_manifest(tmp_path, db):
    save_database(db, tmp_path)
    tmp_path.joinpath("manifest.json").write_text("{not json")
    with pytest.raises(DatabaseFormatError):
        load_database(tmp_path)


def test_unknown_family(tmp_path, db):
    save_database(db, tmp_path)
    _edit_manifest(tmp_path, lambda m: m.update(family="sift"))
    with pytest.raises(DatabaseFormatError):
        load_database(tmp_path)


def test_family_mismatch(tmp_path, db):
    save_database(db, tmp_path)
    _edit_manifest(tmp_path, lambda m: m.update(family="shot"))
    with pytest.raises(DatabaseFormatError, match="fpfh rows"):
        load_database(tmp_path)


def test_entry_missing_key(tmp_path, db):
    save_database(db, tmp_path)
    _edit_manifest(tmp_path, lambda m: m["views"][1].pop("keypoints"))
    with pytest.raises(DatabaseFormatError, match="keypoints"):
        load_database(tmp_path)


def test_missing_view_file(tmp_path, db):
    save_database(db, tmp_path)
    tmp_path.joinpath("view0002.desc").unlink()
    with pytest.raises(DatabaseFormatError):
        load_database(tmp_path)


def test_truncated_descriptors(tmp_path, db):
    save_database(db, tmp_path)
    path = tmp_path.joinpath("view0001.desc")
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(DatabaseFormatError, match="expected"):
        load_database(tmp_path)
    path.write_bytes(b"BREC")
    with pytest.raises(DatabaseFormatError, match="truncated header"):
        load_database(tmp_path)


def test_bad_magic(tmp_path, db):
    save_database(db, tmp_path)
    path = tmp_path.joinpath("view0000.desc")
    path.write_bytes(b"NOTADESC" + path.read_bytes()[8:])
    with pytest.raises(DatabaseFormatError, match="not a descriptor file"):
        load_database(tmp_path)


def test_keypoint_count_mismatch(tmp_path, db):
    save_database(db, tmp_path)
    _edit_manifest(tmp_path, lambda m: m["views"][0].update(keypoints="view0001.pcd"))
    with pytest.raises(DatabaseFormatError, match="5 descriptors but 3 keypoints"):
        load_database(tmp_path)
