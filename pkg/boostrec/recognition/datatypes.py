#!/usr/bin/python3

from dataclasses import dataclass, field
from typing import Any, NamedTuple, Tuple

import numpy as np

from boostrec.cloud.datatypes import RigidTransform
from boostrec.descriptors.base import DescriptorSet


class Correspondence(NamedTuple):
    """A scene keypoint paired with its nearest model descriptor."""

    scene_index: int
    scene_point: np.ndarray
    model_id: str
    view_id: str
    model_index: int
    model_point: np.ndarray
    distance: float


@dataclass(frozen=True, eq=False)
class ModelView:

    """
    One 2.5D view of a model: keypoint positions in the view frame, their
    descriptors and the transform taking view coordinates to the model frame.
    """

    model_id: str
    view_id: str
    descriptors: DescriptorSet
    transform: RigidTransform = field(default_factory=RigidTransform.identity)

    def __post_init__(self) -> None:
        object.__setattr__(self, "model_id", str(self.model_id))
        object.__setattr__(self, "view_id", str(self.view_id))

    def __len__(self) -> int:
        return len(self.descriptors)

    def __repr__(self) -> str:
        return f"<ModelView {self.model_id}/{self.view_id} {len(self)} keypoints>"

    @property
    def key(self) -> Tuple[str, str]:
        return (self.model_id, self.view_id)

    @property
    def positions(self) -> np.ndarray:
        return self.descriptors.positions


@dataclass(frozen=True, eq=False)
class Cluster:

    """Geometrically consistent correspondences between one model view and the scene."""

    model_id: str
    view_id: str
    members: Tuple[Correspondence, ...]
    seed: int = 0

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"<Cluster {self.model_id}/{self.view_id} size={len(self)}>"

    @property
    def size(self) -> int:
        return len(self.members)

    def scene_points(self) -> np.ndarray:
        return np.array([i.scene_point for i in self.members], dtype=np.float64).reshape(-1, 3)

    def model_points(self) -> np.ndarray:
        return np.array([i.model_point for i in self.members], dtype=np.float64).reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class Detection:

    """A recognized model: its pose (model frame to scene frame) and consensus size."""

    model_id: str
    pose: RigidTransform
    support: int
    view_id: str = ""

    def __repr__(self) -> str:
        return f"<Detection {self.model_id} support={self.support}>"

    def as_dict(self) -> dict:
        return {
            "model": self.model_id,
            "view": self.view_id,
            "support": int(self.support),
            "pose": self.pose.as_matrix().tolist(),
        }

    @classmethod
    def from_dict(cls, data: Any) -> "Detection":
        return cls(
            str(data["model"]),
            RigidTransform.from_matrix(data["pose"]),
            int(data["support"]),
            str(data.get("view", "")),
        )
