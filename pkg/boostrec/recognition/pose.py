#!/usr/bin/python3

from typing import Any, Union

import numpy as np

from boostrec.cloud.datatypes import RigidTransform
from boostrec.exceptions import DegenerateConfiguration
from boostrec.recognition.datatypes import Cluster

MIN_MEMBERS = 3
# ratio of the second to the first singular value under which points are collinear
COLLINEAR_TOLERANCE = 1e-9


def _check_spread(points: np.ndarray, side: str) -> None:
    singular = np.linalg.svd(points - points.mean(axis=0), compute_uv=False)
    if singular[0] <= 0 or singular[1] <= COLLINEAR_TOLERANCE * singular[0]:
        raise DegenerateConfiguration(f"{side} points are coincident or collinear")


def estimate_pose(cluster: Union[Cluster, Any], scene_points: Any = None) -> RigidTransform:
    """
    Least-squares rigid transform taking model points onto scene points.

    Accepts a Cluster, or two aligned (n, 3) arrays ``model_points`` and
    ``scene_points``. Rows are put in a canonical order first so the result does
    not depend on member order.
    """
    if isinstance(cluster, Cluster):
        model, scene = cluster.model_points(), cluster.scene_points()
    else:
        model = np.asarray(cluster, dtype=np.float64).reshape(-1, 3)
        scene = np.asarray(scene_points, dtype=np.float64).reshape(-1, 3)
    if len(model) != len(scene):
        raise ValueError(f"{len(model)} model points but {len(scene)} scene points")
    if len(model) < MIN_MEMBERS:
        raise DegenerateConfiguration(
            f"Pose estimation needs at least {MIN_MEMBERS} correspondences, got {len(model)}"
        )

    order = np.lexsort(np.hstack([model, scene]).T[::-1])
    model, scene = model[order], scene[order]
    _check_spread(model, "Model")
    _check_spread(scene, "Scene")

    model_mean = model.mean(axis=0)
    scene_mean = scene.mean(axis=0)
    covariance = (model - model_mean).T @ (scene - scene_mean)
    u, _, vt = np.linalg.svd(covariance)
    correction = np.diag([1.0, 1.0, np.sign(np.linalg.det(vt.T @ u.T))])
    rotation = vt.T @ correction @ u.T
    return RigidTransform(rotation, scene_mean - rotation @ model_mean)
