#!/usr/bin/python3

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, Optional

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.exceptions import MissingColorError

NORM_TOLERANCE = 1e-6


class DescriptorFamily(str, Enum):
    SHOT = "shot"
    CSHOT = "cshot"
    FPFH = "fpfh"
    PFHRGB = "pfhrgb"

    @property
    def length(self) -> int:
        return DESCRIPTOR_LENGTHS[self]

    @property
    def needs_color(self) -> bool:
        return self in (DescriptorFamily.CSHOT, DescriptorFamily.PFHRGB)

    @property
    def unit_norm(self) -> bool:
        return self in (DescriptorFamily.SHOT, DescriptorFamily.CSHOT)

    def __str__(self) -> str:
        return self.value


DESCRIPTOR_LENGTHS = {
    DescriptorFamily.SHOT: 352,
    DescriptorFamily.CSHOT: 1344,
    DescriptorFamily.FPFH: 33,
    DescriptorFamily.PFHRGB: 250,
}


@dataclass(frozen=True, eq=False)
class Descriptor:

    """A single descriptor vector and the index of the keypoint it describes."""

    family: DescriptorFamily
    values: np.ndarray
    keypoint: int = -1
    valid: bool = True

    def __post_init__(self) -> None:
        family = DescriptorFamily(self.family)
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        check_values(family, values[None, :])
        values.flags.writeable = False
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class DescriptorSet:

    """
    Descriptors of one family for a set of keypoints.

    Row ``i`` describes the keypoint at ``indices[i]`` (an index into the cloud
    the descriptors were computed on) located at ``positions[i]``. Rows whose
    support was empty are all-zero and flagged in ``valid``.
    """

    family: DescriptorFamily
    values: np.ndarray
    indices: np.ndarray
    positions: np.ndarray
    valid: np.ndarray

    def __post_init__(self) -> None:
        family = DescriptorFamily(self.family)
        values = np.array(self.values, dtype=np.float64).reshape(-1, family.length)
        indices = np.array(self.indices, dtype=np.int64).reshape(-1)
        positions = np.array(self.positions, dtype=np.float64).reshape(-1, 3)
        valid = np.array(self.valid, dtype=bool).reshape(-1)
        if not len(values) == len(indices) == len(positions) == len(valid):
            raise ValueError("Descriptor rows, indices, positions and flags must align")
        check_values(family, values)
        for name, array in (
            ("family", family),
            ("values", values),
            ("indices", indices),
            ("positions", positions),
            ("valid", valid),
        ):
            if isinstance(array, np.ndarray):
                array.flags.writeable = False
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Descriptor]:
        for i in range(len(self)):
            yield Descriptor(self.family, self.values[i], int(self.indices[i]), bool(self.valid[i]))

    def __repr__(self) -> str:
        return f"<DescriptorSet {self.family.value} {len(self)}x{self.family.length}>"

    @property
    def dim(self) -> int:
        return self.family.length

    @classmethod
    def empty(cls, family: Any) -> "DescriptorSet":
        family = DescriptorFamily(family)
        return cls(family, np.zeros((0, family.length)), [], np.zeros((0, 3)), [])

    def only_valid(self) -> "DescriptorSet":
        keep = self.valid
        return DescriptorSet(
            self.family,
            self.values[keep],
            self.indices[keep],
            self.positions[keep],
            self.valid[keep],
        )


def check_values(family: DescriptorFamily, values: np.ndarray) -> None:
    """Asserts the length, finiteness and normalization of descriptor rows."""
    if values.shape[1] != family.length:
        raise ValueError(
            f"{family.value} descriptors have length {family.length}, got {values.shape[1]}"
        )
    if not np.isfinite(values).all():
        raise ValueError(f"{family.value} descriptor values must be finite")
    if (values < 0).any():
        raise ValueError(f"{family.value} histogram values must be non-negative")
    if family.unit_norm and len(values):
        norms = np.linalg.norm(values, axis=1)
        bad = (norms > 0) & (np.abs(norms - 1) > NORM_TOLERANCE)
        if bad.any():
            raise ValueError(f"{family.value} descriptors must have unit norm")


def require_color(cloud: PointCloud, family: Optional[DescriptorFamily] = None) -> np.ndarray:
    if cloud.rgb is None:
        name = family.value if family is not None else "this descriptor"
        raise MissingColorError(f"{name} needs a cloud with RGB data")
    return cloud.rgb


def require_normals(cloud: PointCloud) -> np.ndarray:
    if cloud.normals is None:
        raise ValueError("Descriptors need a cloud with estimated normals")
    return cloud.normals


def soft_bins(coord: np.ndarray, count: int, cyclic: bool) -> tuple:
    """
    Linear interpolation between the two bins nearest a continuous coordinate
    given in bin units (bin k covers [k, k + 1)). Returns (low, high, weight of
    high). Non-cyclic coordinates clamp to the edge bins.
    """
    shifted = coord - 0.5
    low = np.floor(shifted)
    frac = shifted - low
    low = low.astype(np.int64)
    high = low + 1
    if cyclic:
        low %= count
        high %= count
    else:
        low = np.clip(low, 0, count - 1)
        high = np.clip(high, 0, count - 1)
    return low, high, frac


def hard_bins(values: np.ndarray, lo: float, hi: float, count: int) -> np.ndarray:
    """Index of the bin holding each value over [lo, hi] split into ``count`` bins."""
    index = np.floor((values - lo) / (hi - lo) * count).astype(np.int64)
    return np.clip(index, 0, count - 1)
