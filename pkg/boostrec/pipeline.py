#!/usr/bin/python3

import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from time import perf_counter
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from boostrec._config import CONFIG, PIPELINE_NAMES, SUPPORT_MODES, parse_detector
from boostrec.cloud.datatypes import PointCloud, RigidTransform, compact
from boostrec.descriptors import DescriptorFamily, DescriptorSet, compute_descriptors
from boostrec.descriptors.compute import support_radius
from boostrec.exceptions import BoostrecRuntimeWarning, ConfigValidationError
from boostrec.geometry.normals import estimate_normals
from boostrec.keypoints import fast_detect, iss_detect, lift_to_3d, uniform_sampling
from boostrec.recognition import (
    Cluster,
    Detection,
    ModelDatabase,
    build_database,
    detections_from_clusters,
    match_scene,
)
from boostrec.recognition.grouping import best_clusters
from boostrec.saliency import (
    BinaryMask,
    SaliencyMask,
    binarize,
    filter_cloud,
    filter_keypoints_2d,
    spectral_residual_saliency,
)
from boostrec.spatial.kdtree import KdTree3, build_tree

STAGES = ("saliency", "detect", "describe", "match", "group", "pose")

MaskLike = Union[BinaryMask, SaliencyMask, None]


@dataclass(frozen=True)
class PipelineSettings:

    """Every knob of one recognition run, usually read from CONFIG."""

    detector: str = "us"
    detector_params: Dict[str, Any] = field(default_factory=lambda: {"leaf": 0.03})
    family: DescriptorFamily = DescriptorFamily.SHOT
    radius: float = 0.05
    normals_k: int = 10
    viewpoint: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    saliency_threshold: float = 0.5
    dilate_px: int = 8
    descriptor_support: str = "auto"
    epsilon: float = 0.01
    min_size: int = 3
    database_leaf: float = 0.01
    workers: int = 1

    @classmethod
    def from_config(
        cls,
        settings: Optional[Dict] = None,
        detector: Optional[str] = None,
        family: Optional[str] = None,
    ) -> "PipelineSettings":
        """
        Builds settings from a config dict (CONFIG.settings by default). ``detector``
        is a spec such as "iss" or "us:0.02" and overrides keypoints.detector.
        """
        if settings is None:
            settings = CONFIG.settings
        name, inline = parse_detector(detector or settings["keypoints"]["detector"])
        kp = settings["keypoints"]
        if name == "us":
            params: Dict[str, Any] = {"leaf": inline.get("leaf", kp["us"]["leaf"])}
        elif name == "iss":
            params = dict(kp["iss"])
        elif name == "fast":
            params = {"threshold": kp["fast"]["threshold"], "use_nms": kp["fast"]["nms"]}
        else:
            raise ConfigValidationError("keypoints.detector", f"unknown detector {name!r}")
        rec = settings["recognition"]
        return cls(
            detector=name,
            detector_params=params,
            family=DescriptorFamily(family or settings["descriptors"]["family"]),
            radius=float(settings["descriptors"]["radius"]),
            normals_k=int(settings["normals"]["k"]),
            viewpoint=tuple(float(i) for i in settings["normals"]["viewpoint"]),  # type: ignore
            saliency_threshold=float(settings["saliency"]["threshold"]),
            dilate_px=int(settings["saliency"]["dilate_px"]),
            descriptor_support=settings["saliency"]["descriptor_support"],
            epsilon=float(rec["epsilon"]),
            min_size=int(rec["min_size"]),
            database_leaf=float(rec["database_leaf"]),
            workers=int(rec["workers"]),
        )

    @property
    def label(self) -> str:
        if self.detector == "us":
            return f"us:{self.detector_params['leaf']:g}"
        return self.detector


class StageTimer:

    """Wall-clock seconds spent in each pipeline stage."""

    def __init__(self) -> None:
        self.times: Dict[str, float] = dict.fromkeys(STAGES, 0.0)

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        if name not in self.times:
            raise KeyError(f"Unknown stage '{name}'")
        start = perf_counter()
        try:
            yield
        finally:
            self.times[name] += perf_counter() - start

    @property
    def total(self) -> float:
        return sum(self.times.values())


@dataclass(eq=False)
class SceneResult:

    """Everything one pipeline run produced for a scene."""

    pipeline: str
    keypoints: int
    points: int
    descriptors: DescriptorSet
    correspondences: int
    clusters: Dict[str, Cluster]
    detections: List[Detection]
    times: Dict[str, float]
    mask: Optional[BinaryMask] = None

    @property
    def total_time(self) -> float:
        return sum(self.times.values())


def saliency_mask(cloud: PointCloud, mask: MaskLike, settings: PipelineSettings) -> BinaryMask:
    """Binary mask for a boosted run, from a given mask or the scene's own image."""
    if isinstance(mask, BinaryMask):
        return mask
    if mask is None:
        warnings.warn(
            "Scene has no saliency mask, computing a spectral residual map",
            BoostrecRuntimeWarning,
        )
        mask = spectral_residual_saliency(cloud.image())
    return binarize(mask, settings.saliency_threshold, settings.dilate_px)


def _detect(
    cloud: PointCloud, settings: PipelineSettings, mask: Optional[BinaryMask]
) -> Tuple[np.ndarray, PointCloud, Optional[KdTree3]]:
    """
    Runs the keypoint detector. Returns the keypoints as indices into ``cloud``,
    the cloud the detector worked on and, when one was built, a tree over it.
    """
    params = settings.detector_params
    if settings.detector == "fast":
        found = fast_detect(cloud.image(), params["threshold"], params["use_nms"])
        if mask is not None:
            found = filter_keypoints_2d(found, mask)
        return lift_to_3d(found, cloud).indices, compact(cloud), None

    working = compact(cloud) if mask is None else filter_cloud(cloud, mask)
    if not len(working):
        return np.zeros(0, dtype=np.int64), working, None
    if settings.detector == "us":
        keypoints = uniform_sampling(working, params["leaf"])
        return keypoints.source_indices(working), working, None
    tree = build_tree(working)
    keypoints = iss_detect(working, tree, **params)
    return keypoints.source_indices(working), working, tree


def _support_cloud(
    cloud: PointCloud,
    working: PointCloud,
    tree: Optional[KdTree3],
    settings: PipelineSettings,
    mask: Optional[BinaryMask],
) -> Tuple[PointCloud, Optional[KdTree3]]:
    mode = settings.descriptor_support
    if mode not in SUPPORT_MODES:
        raise ConfigValidationError("saliency.descriptor_support", f"unknown mode {mode!r}")
    if mask is None:
        return working, tree
    if settings.detector == "fast":
        if mode == "salient":
            return filter_cloud(cloud, mask), None
        return working, tree
    if mode == "full":
        return compact(cloud), None
    return working, tree


def describe_keypoints(
    support: PointCloud,
    tree: Optional[KdTree3],
    indices: Any,
    settings: PipelineSettings,
) -> DescriptorSet:
    """
    Estimates normals around the keypoints ``indices`` of ``support`` and
    describes them. Normals are only computed where the descriptor reads them.
    """
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if not len(indices):
        return DescriptorSet.empty(settings.family)
    if tree is None:
        tree = build_tree(support)
    reach = support_radius(settings.family, settings.radius)
    nearby = tree.radius_many(support.xyz[indices], reach)
    needed = np.unique(np.concatenate([indices] + list(nearby)))
    support = estimate_normals(support, tree, settings.normals_k, settings.viewpoint, needed)
    return compute_descriptors(settings.family, support, tree, indices, settings.radius)


def process_scene(
    cloud: PointCloud,
    db: ModelDatabase,
    settings: PipelineSettings,
    pipeline: str = "LP",
    mask: MaskLike = None,
) -> SceneResult:
    """
    Runs the local descriptor pipeline (``"LP"``) or its saliency boosted
    variant (``"Boost"``) on one organized scene cloud, timing every stage.

    The boosted run first reduces the scene to its salient pixels: 3D detectors
    see only the salient points, FAST keypoints outside the mask are dropped.
    """
    if pipeline not in PIPELINE_NAMES:
        raise ValueError(f"Unknown pipeline '{pipeline}', expected one of {PIPELINE_NAMES}")
    if cloud.provenance is not None:
        # keypoint sources are indices into this cloud
        cloud = cloud.replace(provenance=None)
    timer = StageTimer()
    binary = None
    if pipeline == "Boost":
        with timer.stage("saliency"):
            binary = saliency_mask(cloud, mask, settings)

    with timer.stage("detect"):
        sources, working, tree = _detect(cloud, settings, binary)

    with timer.stage("describe"):
        support, support_tree = _support_cloud(cloud, working, tree, settings, binary)
        positions = np.searchsorted(support.provenance, sources) if len(support) else sources
        descriptors = describe_keypoints(support, support_tree, positions, settings)

    with timer.stage("match"):
        correspondences = match_scene(descriptors, db, settings.workers)

    with timer.stage("group"):
        clusters = best_clusters(correspondences, settings.epsilon, settings.min_size)

    with timer.stage("pose"):
        detections = detections_from_clusters(clusters, db)

    return SceneResult(
        pipeline=pipeline,
        keypoints=len(sources),
        points=len(working),
        descriptors=descriptors,
        correspondences=len(correspondences),
        clusters=clusters,
        detections=detections,
        times=timer.times,
        mask=binary,
    )


def describe_view(cloud: PointCloud, settings: PipelineSettings) -> DescriptorSet:
    """Uniformly samples a training view at the database leaf size and describes it."""
    working = compact(cloud)
    if not len(working):
        return DescriptorSet.empty(settings.family)
    keypoints = uniform_sampling(working, settings.database_leaf)
    return describe_keypoints(working, None, keypoints.indices, settings)


def train_database(
    views: Iterable[Tuple[str, str, PointCloud, RigidTransform]], settings: PipelineSettings
) -> ModelDatabase:
    """
    Builds a model database from (model id, view id, view cloud, view-to-model
    transform) entries, describing every view with ``settings.family``.
    """
    entries = []
    for model_id, view_id, cloud, transform in views:
        descriptors = describe_view(cloud, settings)
        entries.append((model_id, view_id, None, descriptors, transform))
    return build_database(entries)
