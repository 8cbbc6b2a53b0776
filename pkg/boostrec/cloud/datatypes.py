#!/usr/bin/python3

from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

from boostrec.exceptions import EmptyCloudError, UnorganizedCloudError

NORMAL_TOLERANCE = 1e-6
ROTATION_TOLERANCE = 1e-9

XyzLike = Union["Point3", Sequence[float], np.ndarray]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Point3:

    """A single 3D point in meters, optionally carrying color and a unit normal.

    An invalid point has all three coordinates set to NaN."""

    x: float
    y: float
    z: float
    rgb: Optional[Tuple[int, int, int]] = None
    normal: Optional[Tuple[float, float, float]] = None

    def __post_init__(self) -> None:
        coords = (self.x, self.y, self.z)
        nan_count = sum(np.isnan(i) for i in coords)
        if nan_count not in (0, 3):
            raise ValueError("A point is either fully valid or has all coordinates set to NaN")
        if self.normal is not None:
            length = float(np.linalg.norm(self.normal))
            if abs(length - 1) > NORMAL_TOLERANCE:
                raise ValueError(f"Normal must have unit length, got {length}")
        if self.rgb is not None and any(not 0 <= int(i) <= 255 for i in self.rgb):
            raise ValueError(f"RGB channels must be 8-bit values, got {self.rgb}")

    @property
    def valid(self) -> bool:
        return not np.isnan(self.x)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


def as_xyz(value: XyzLike) -> np.ndarray:
    """Returns a query location as a float64 array of shape (3,)."""
    if isinstance(value, Point3):
        return value.as_array()
    array = np.asarray(value, dtype=np.float64).reshape(-1)
    if array.shape != (3,):
        raise ValueError(f"Expected three coordinates, got shape {np.shape(value)}")
    return array


class PointCloud:

    """Immutable, possibly organized set of 3D points.

    Points are stored as an (N, 3) float64 array. Organized clouds (height > 1)
    store the point at pixel (row, col) at index ``row * width + col``. Invalid
    points have NaN coordinates, invalid normals are NaN rows. ``provenance``
    holds the index each point had in the cloud it was extracted from."""

    def __init__(
        self,
        xyz: Any,
        width: Optional[int] = None,
        height: int = 1,
        rgb: Optional[Any] = None,
        normals: Optional[Any] = None,
        provenance: Optional[Any] = None,
    ) -> None:
        points = np.array(xyz, dtype=np.float64, copy=True).reshape(-1, 3)
        points[np.isnan(points).any(axis=1)] = np.nan
        count = len(points)

        if width is None:
            width = count // height if height else 0
        if width * height != count:
            raise ValueError(f"width x height ({width}x{height}) does not match {count} points")
        self.width = int(width)
        self.height = int(height)
        self.xyz = _frozen(points)

        self.rgb: Optional[np.ndarray] = None
        if rgb is not None:
            colors = np.array(rgb, copy=True)
            if colors.shape != (count, 3):
                raise ValueError(f"rgb must have shape ({count}, 3), got {colors.shape}")
            if colors.dtype != np.uint8:
                if colors.min(initial=0) < 0 or colors.max(initial=0) > 255:
                    raise ValueError("rgb channels must lie in [0, 255]")
                colors = colors.astype(np.uint8)
            self.rgb = _frozen(colors)

        self.normals: Optional[np.ndarray] = None
        if normals is not None:
            self.normals = _frozen(_clean_normals(np.array(normals, dtype=np.float64), count))

        self.provenance: Optional[np.ndarray] = None
        if provenance is not None:
            prov = np.array(provenance, dtype=np.int64).reshape(-1)
            if prov.shape != (count,):
                raise ValueError(f"provenance must have {count} entries")
            self.provenance = _frozen(prov)

        self.valid = _frozen(~np.isnan(points[:, 0]))

    def __len__(self) -> int:
        return len(self.xyz)

    def __iter__(self) -> Iterator[Point3]:
        for i in range(len(self)):
            yield self.point(i)

    def __repr__(self) -> str:
        kind = "organized" if self.is_organized else "unorganized"
        extras = [name for name in ("rgb", "normals") if getattr(self, name) is not None]
        extra_str = f" +{'+'.join(extras)}" if extras else ""
        return f"<PointCloud {kind} {self.width}x{self.height}{extra_str}>"

    @property
    def is_organized(self) -> bool:
        return self.height > 1

    @property
    def dense(self) -> bool:
        return bool(self.valid.all())

    @property
    def valid_indices(self) -> np.ndarray:
        return np.flatnonzero(self.valid)

    @property
    def has_rgb(self) -> bool:
        return self.rgb is not None

    @property
    def has_normals(self) -> bool:
        return self.normals is not None

    def index(self, row: int, col: int) -> int:
        """Returns the storage index of the point registered at pixel (row, col)."""
        if not self.is_organized:
            raise UnorganizedCloudError("Pixel indexing requires an organized cloud")
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise IndexError(f"Pixel ({row}, {col}) outside {self.width}x{self.height} cloud")
        return row * self.width + col

    def point(self, index: int) -> Point3:
        x, y, z = (float(i) for i in self.xyz[index])
        rgb = None if self.rgb is None else tuple(int(i) for i in self.rgb[index])
        normal = None
        if self.normals is not None and not np.isnan(self.normals[index, 0]):
            normal = tuple(float(i) for i in self.normals[index])
        return Point3(x, y, z, rgb, normal)  # type: ignore

    def image(self) -> np.ndarray:
        """Returns the registered RGB raster of an organized cloud, shape (height, width, 3)."""
        if not self.is_organized:
            raise UnorganizedCloudError("Only organized clouds carry a registered image")
        if self.rgb is None:
            return np.zeros((self.height, self.width, 3), dtype=np.uint8)
        return self.rgb.reshape(self.height, self.width, 3).copy()

    def replace(self, **kwargs: Any) -> "PointCloud":
        """Returns a copy of the cloud with some attributes swapped out."""
        values = {
            "xyz": self.xyz,
            "width": self.width,
            "height": self.height,
            "rgb": self.rgb,
            "normals": self.normals,
            "provenance": self.provenance,
        }
        values.update(kwargs)
        return PointCloud(**values)

    def subset(self, indices: Sequence[int]) -> "PointCloud":
        """Returns an unorganized cloud holding the given points, tagged with provenance."""
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        source = self.provenance[idx] if self.provenance is not None else idx
        return PointCloud(
            self.xyz[idx],
            width=len(idx),
            height=1,
            rgb=None if self.rgb is None else self.rgb[idx],
            normals=None if self.normals is None else self.normals[idx],
            provenance=source,
        )


def _orthonormalize(rotation: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(rotation)
    return u @ vt


def _clean_normals(normals: np.ndarray, count: int) -> np.ndarray:
    normals = normals.reshape(-1, 3)
    if len(normals) != count:
        raise ValueError(f"normals must have shape ({count}, 3), got {normals.shape}")
    with np.errstate(invalid="ignore", divide="ignore"):
        length = np.linalg.norm(normals, axis=1)
        bad = ~np.isfinite(length) | (length < NORMAL_TOLERANCE)
        normals = normals / length[:, None]
    normals[bad] = np.nan
    return normals


@dataclass(frozen=True, eq=False)
class RigidTransform:

    """Rotation plus translation (meters), mapping p to R @ p + t."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        rotation = np.array(self.rotation, dtype=np.float64).reshape(3, 3)
        translation = np.array(self.translation, dtype=np.float64).reshape(3)
        if not np.allclose(rotation.T @ rotation, np.eye(3), rtol=0, atol=ROTATION_TOLERANCE):
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(rotation) - 1) > ROTATION_TOLERANCE:
            raise ValueError("rotation must have determinant +1")
        if not np.isfinite(translation).all():
            raise ValueError("translation must be finite")
        object.__setattr__(self, "rotation", _frozen(rotation))
        object.__setattr__(self, "translation", _frozen(translation))

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls()

    @classmethod
    def from_matrix(cls, matrix: Any) -> "RigidTransform":
        """Builds a transform from a 4x4 homogeneous or 3x4 row-major matrix."""
        m = np.asarray(matrix, dtype=np.float64)
        if m.size == 12:
            m = m.reshape(3, 4)
        elif m.size == 16:
            m = m.reshape(4, 4)
            if not np.allclose(m[3], [0, 0, 0, 1]):
                raise ValueError("last row of a homogeneous transform must be [0, 0, 0, 1]")
        else:
            raise ValueError(f"expected 12 or 16 values, got {m.size}")
        return cls(m[:3, :3], m[:3, 3])

    @classmethod
    def random(
        cls, rng: np.random.Generator, max_translation: float = 1.0
    ) -> "RigidTransform":
        # a normalized gaussian quaternion is uniform over rotations
        rotation = Rotation.from_quat(rng.normal(size=4)).as_matrix()
        translation = rng.uniform(-max_translation, max_translation, 3)
        return cls(_orthonormalize(rotation), translation)

    @classmethod
    def from_euler(
        cls,
        angles: Sequence[float],
        translation: Sequence[float] = (0, 0, 0),
        degrees: bool = True,
    ) -> "RigidTransform":
        rotation = Rotation.from_euler("xyz", angles, degrees=degrees).as_matrix()
        return cls(_orthonormalize(rotation), translation)

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.rotation.T, -self.rotation.T @ self.translation)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Returns the transform applying ``other`` first, then ``self``."""
        return RigidTransform(
            self.rotation @ other.rotation, self.rotation @ other.translation + self.translation
        )

    def apply(self, points: Any) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation

    def rotate(self, vectors: Any) -> np.ndarray:
        return np.asarray(vectors, dtype=np.float64) @ self.rotation.T

    def rotation_error(self, other: "RigidTransform") -> float:
        """Angle in radians of the relative rotation between two transforms."""
        relative = self.rotation.T @ other.rotation
        cos = np.clip((np.trace(relative) - 1) / 2, -1.0, 1.0)
        return float(np.arccos(cos))

    def translation_error(self, other: "RigidTransform") -> float:
        return float(np.linalg.norm(self.translation - other.translation))

    def __repr__(self) -> str:
        return f"<RigidTransform t={np.round(self.translation, 6).tolist()}>"


@dataclass(frozen=True, eq=False)
class Aabb:

    """Axis-aligned bounding box, min <= max componentwise."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self) -> None:
        lo = np.array(self.min, dtype=np.float64).reshape(3)
        hi = np.array(self.max, dtype=np.float64).reshape(3)
        if (lo > hi).any():
            raise ValueError(f"min {lo.tolist()} exceeds max {hi.tolist()}")
        object.__setattr__(self, "min", _frozen(lo))
        object.__setattr__(self, "max", _frozen(hi))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Aabb):
            return NotImplemented
        return bool(np.array_equal(self.min, other.min) and np.array_equal(self.max, other.max))

    @property
    def extent(self) -> np.ndarray:
        return self.max - self.min

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def intersection_volume(self, other: "Aabb") -> float:
        overlap = np.minimum(self.max, other.max) - np.maximum(self.min, other.min)
        return float(np.prod(np.clip(overlap, 0, None)))

    def overlaps(self, other: "Aabb") -> bool:
        return bool((np.minimum(self.max, other.max) >= np.maximum(self.min, other.min)).all())

    def shifted(self, offset: Sequence[float]) -> "Aabb":
        return Aabb(self.min + offset, self.max + offset)


def transform_cloud(cloud: PointCloud, transform: RigidTransform) -> PointCloud:
    """Applies a rigid transform to every valid point and normal, preserving layout."""
    xyz = transform.apply(cloud.xyz)
    xyz[~cloud.valid] = np.nan
    normals = None
    if cloud.normals is not None:
        normals = transform.rotate(cloud.normals)
    return cloud.replace(xyz=xyz, normals=normals)


def bounding_box(cloud: PointCloud) -> Aabb:
    """Tight axis-aligned box around the valid points of a cloud."""
    points = cloud.xyz[cloud.valid]
    if not len(points):
        raise EmptyCloudError("Cannot compute the bounding box of a cloud without valid points")
    return Aabb(points.min(axis=0), points.max(axis=0))


def compact(cloud: PointCloud, keep: Optional[np.ndarray] = None) -> PointCloud:
    """Returns an unorganized cloud of the valid points (optionally restricted by a
    per-point boolean mask), in storage order, with provenance to the input."""
    selected = cloud.valid if keep is None else cloud.valid & np.asarray(keep, dtype=bool)
    return cloud.subset(np.flatnonzero(selected))
