#!/usr/bin/python3

import json
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from boostrec._config import __version__
from boostrec.cloud.datatypes import PointCloud, RigidTransform
from boostrec.cloud.io import CloudFormat, load_cloud, save_cloud
from boostrec.descriptors.base import DescriptorFamily, DescriptorSet
from boostrec.exceptions import (
    CloudFormatError,
    DatabaseFormatError,
    DescriptorFamilyMismatch,
    DuplicateView,
    EmptyIndex,
)
from boostrec.keypoints.datatypes import KeypointSet
from boostrec.recognition.datatypes import ModelView
from boostrec.spatial.descriptor_index import DescriptorIndex

MANIFEST_NAME = "manifest.json"
DESCRIPTOR_MAGIC = b"BRECDESC"
# magic, family name (NUL padded), row length, row count
DESCRIPTOR_HEADER = struct.Struct("<8s8sII")

ViewSpec = Union[ModelView, Tuple[Any, ...]]


class ModelDatabase:

    """
    Descriptors of every training view of every model, searchable through a
    single descriptor index. Index provenance is (model id, view id, row of the
    keypoint within its view).
    """

    def __init__(self, views: Iterable[ModelView]) -> None:
        self.views: Dict[Tuple[str, str], ModelView] = {}
        family: Optional[DescriptorFamily] = None
        for view in views:
            if view.key in self.views:
                raise DuplicateView(f"View '{view.view_id}' of model '{view.model_id}' given twice")
            if family is None:
                family = view.descriptors.family
            elif view.descriptors.family != family:
                raise DescriptorFamilyMismatch(
                    f"Database mixes {family.value} and {view.descriptors.family.value} descriptors"
                )
            self.views[view.key] = view
        if family is None:
            raise EmptyIndex("A model database needs at least one view")
        self.family: DescriptorFamily = family

        vectors = [view.descriptors.values for view in self.views.values()]
        provenance = [
            (view.model_id, view.view_id, row)
            for view in self.views.values()
            for row in range(len(view))
        ]
        self.index = DescriptorIndex(
            np.vstack(vectors) if vectors else np.zeros((0, family.length)), provenance
        )

    def __len__(self) -> int:
        return len(self.index)

    def __iter__(self) -> Iterator[ModelView]:
        return iter(self.views.values())

    def __repr__(self) -> str:
        return (
            f"<ModelDatabase {self.family.value} {len(self.model_ids)} models, "
            f"{len(self.views)} views, {len(self)} descriptors>"
        )

    @property
    def model_ids(self) -> List[str]:
        return sorted({model for model, _ in self.views})

    def view(self, model_id: str, view_id: str) -> ModelView:
        try:
            return self.views[(str(model_id), str(view_id))]
        except KeyError:
            raise KeyError(f"No view '{view_id}' of model '{model_id}' in the database") from None

    def keypoint(self, model_id: str, view_id: str, row: int) -> np.ndarray:
        return self.view(model_id, view_id).positions[row]


def _as_view(spec: ViewSpec) -> ModelView:
    if isinstance(spec, ModelView):
        view = spec
    else:
        model_id, view_id, keypoints, descriptors, *rest = spec
        transform = rest[0] if rest else RigidTransform.identity()
        if keypoints is not None:
            positions = (
                keypoints.positions
                if isinstance(keypoints, KeypointSet)
                else np.asarray(keypoints, dtype=np.float64).reshape(-1, 3)
            )
            if len(positions) != len(descriptors):
                raise ValueError(
                    f"{len(positions)} keypoints but {len(descriptors)} descriptors "
                    f"for view '{view_id}' of model '{model_id}'"
                )
            descriptors = DescriptorSet(
                descriptors.family,
                descriptors.values,
                descriptors.indices,
                positions,
                descriptors.valid,
            )
        view = ModelView(model_id, view_id, descriptors, transform)
    if view.descriptors.valid.all():
        return view
    # rows without support carry no shape information
    return ModelView(view.model_id, view.view_id, view.descriptors.only_valid(), view.transform)


def build_database(views: Iterable[ViewSpec]) -> ModelDatabase:
    """
    Builds a model database.

    Each entry is a ModelView or a tuple (model id, view id, keypoints,
    descriptors[, view-to-model transform]). ``keypoints`` may be a KeypointSet,
    an (n, 3) array or None to use the descriptor positions. Descriptor rows
    flagged as empty are left out of the index.
    """
    return ModelDatabase([_as_view(i) for i in views])


def _write_descriptors(path: Path, descriptors: DescriptorSet) -> None:
    values = np.ascontiguousarray(descriptors.values, dtype="<f8")
    header = DESCRIPTOR_HEADER.pack(
        DESCRIPTOR_MAGIC, descriptors.family.value.encode(), values.shape[1], values.shape[0]
    )
    path.write_bytes(header + values.tobytes())


def _read_descriptors(path: Path, positions: np.ndarray) -> DescriptorSet:
    raw = path.read_bytes()
    if len(raw) < DESCRIPTOR_HEADER.size:
        raise DatabaseFormatError(f"{path}: truncated header")
    magic, name, dims, count = DESCRIPTOR_HEADER.unpack_from(raw)
    if magic != DESCRIPTOR_MAGIC:
        raise DatabaseFormatError(f"{path}: not a descriptor file")
    try:
        family = DescriptorFamily(name.rstrip(b"\0").decode())
    except (UnicodeDecodeError, ValueError):
        raise DatabaseFormatError(f"{path}: unknown descriptor family {name!r}") from None
    if dims != family.length:
        raise DatabaseFormatError(f"{path}: {family.value} rows have {family.length} values")
    expected = DESCRIPTOR_HEADER.size + 8 * dims * count
    if len(raw) != expected:
        raise DatabaseFormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    if len(positions) != count:
        raise DatabaseFormatError(f"{path}: {count} descriptors but {len(positions)} keypoints")
    values = np.frombuffer(raw, dtype="<f8", offset=DESCRIPTOR_HEADER.size).reshape(count, dims)
    return DescriptorSet(family, values, np.arange(count), positions, np.ones(count, dtype=bool))


def save_database(db: ModelDatabase, path: Union[str, Path]) -> Path:
    """
    Persists a database as a directory: a JSON manifest, plus one binary
    descriptor file and one keypoint PCD per view.
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    entries = []
    for number, view in enumerate(db):
        stem = f"view{number:04d}"
        _write_descriptors(path.joinpath(f"{stem}.desc"), view.descriptors)
        save_cloud(
            PointCloud(view.positions), path.joinpath(f"{stem}.pcd"), CloudFormat.PCD_BINARY
        )
        entries.append(
            {
                "model": view.model_id,
                "view": view.view_id,
                "transform": view.transform.as_matrix().tolist(),
                "descriptors": f"{stem}.desc",
                "keypoints": f"{stem}.pcd",
            }
        )
    manifest = {"version": __version__, "family": db.family.value, "views": entries}
    path.joinpath(MANIFEST_NAME).write_text(json.dumps(manifest, indent=2))
    return path


def load_database(path: Union[str, Path]) -> ModelDatabase:
    """Loads a database directory written by ``save_database``."""
    path = Path(path)
    manifest_path = path.joinpath(MANIFEST_NAME)
    if not manifest_path.is_file():
        raise DatabaseFormatError(f"{path}: no {MANIFEST_NAME} found")
    try:
        manifest = json.loads(manifest_path.read_text())
        family = DescriptorFamily(manifest["family"])
        entries = manifest["views"]
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise DatabaseFormatError(f"{manifest_path}: {exc}") from None

    views = []
    for entry in entries:
        try:
            transform = RigidTransform.from_matrix(entry["transform"])
            keypoints = load_cloud(path.joinpath(entry["keypoints"]))
            descriptors = _read_descriptors(path.joinpath(entry["descriptors"]), keypoints.xyz)
        except KeyError as exc:
            raise DatabaseFormatError(f"{manifest_path}: view entry misses {exc}") from None
        except (CloudFormatError, OSError) as exc:
            raise DatabaseFormatError(str(exc)) from None
        if descriptors.family != family:
            raise DatabaseFormatError(
                f"{manifest_path}: view '{entry['view']}' holds {descriptors.family.value} rows"
            )
        views.append(ModelView(entry["model"], entry["view"], descriptors, transform))
    return ModelDatabase(views)
