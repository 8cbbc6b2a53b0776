#!/usr/bin/python3

import warnings
from typing import Dict, List

from boostrec.descriptors.base import DescriptorSet
from boostrec.exceptions import BoostrecRuntimeWarning, DegenerateConfiguration
from boostrec.recognition.database import ModelDatabase
from boostrec.recognition.datatypes import Cluster, Detection
from boostrec.recognition.grouping import best_clusters
from boostrec.recognition.matching import match_scene
from boostrec.recognition.pose import estimate_pose


def detections_from_clusters(clusters: Dict[str, Cluster], db: ModelDatabase) -> List[Detection]:
    """
    Estimates one pose per model from its best cluster. The cluster pose maps
    view coordinates to the scene and is composed with the model-to-view
    transform, so the detection pose maps the model frame to the scene.
    Clusters whose points are collinear are skipped with a warning.
    """
    detections = []
    for model_id in sorted(clusters):
        cluster = clusters[model_id]
        try:
            view_pose = estimate_pose(cluster)
        except DegenerateConfiguration as exc:
            warnings.warn(f"Skipping model '{model_id}': {exc}", BoostrecRuntimeWarning)
            continue
        view = db.view(cluster.model_id, cluster.view_id)
        pose = view_pose.compose(view.transform.inverse())
        detections.append(Detection(model_id, pose, cluster.size, cluster.view_id))
    return detections


def recognize(
    scene: DescriptorSet,
    db: ModelDatabase,
    epsilon: float = 0.01,
    min_size: int = 3,
    workers: int = 1,
) -> List[Detection]:
    """
    Recognizes database models in a described scene.

    Each scene keypoint is matched to its nearest model descriptor, the matches
    of each view are grouped by geometric consistency and a model is detected
    when its largest group over all views has at least ``min_size`` members.
    At most one detection is returned per model, ordered by model id.
    """
    correspondences = match_scene(scene, db, workers)
    return detections_from_clusters(best_clusters(correspondences, epsilon, min_size), db)
