#!/usr/bin/python3

from dataclasses import dataclass, field
from typing import Any, Dict, NamedTuple

import numpy as np

from boostrec.cloud.datatypes import PointCloud


class Keypoint2D(NamedTuple):
    """Pixel keypoint, indexed as (row, col) like the raster it came from."""

    row: int
    col: int
    score: float = 0.0


@dataclass(frozen=True, eq=False)
class KeypointSet:

    """Keypoints selected from a cloud: unique indices into it and their positions."""

    indices: np.ndarray
    positions: np.ndarray
    detector: str = ""
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        indices = np.array(self.indices, dtype=np.int64).reshape(-1)
        positions = np.array(self.positions, dtype=np.float64).reshape(-1, 3)
        if len(indices) != len(positions):
            raise ValueError(f"{len(indices)} indices but {len(positions)} positions")
        if len(np.unique(indices)) != len(indices):
            raise ValueError("Keypoint indices must be unique")
        if not np.isfinite(positions).all():
            raise ValueError("Keypoint positions must be finite")
        indices.flags.writeable = False
        positions.flags.writeable = False
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "positions", positions)

    def __len__(self) -> int:
        return len(self.indices)

    def __repr__(self) -> str:
        return f"<KeypointSet {self.detector} {len(self)} keypoints>"

    @classmethod
    def from_indices(
        cls, cloud: PointCloud, indices: Any, detector: str, **params: Any
    ) -> "KeypointSet":
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        return cls(indices, cloud.xyz[indices], detector, params)

    def source_indices(self, cloud: PointCloud) -> np.ndarray:
        """Indices in the cloud ``cloud`` was extracted from, via its provenance."""
        if cloud.provenance is None:
            return self.indices.copy()
        return cloud.provenance[self.indices]
