#!/usr/bin/python3

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from boostrec.recognition.datatypes import Cluster, Correspondence


def consistency_matrix(correspondences: Sequence[Correspondence], epsilon: float) -> np.ndarray:
    """
    Boolean (n, n) matrix, True where two correspondences agree on a rigid
    motion: the distance between their scene points and the distance between
    their model points differ by at most ``epsilon``.
    """
    scene = np.array([i.scene_point for i in correspondences], dtype=np.float64).reshape(-1, 3)
    model = np.array([i.model_point for i in correspondences], dtype=np.float64).reshape(-1, 3)
    scene_dist = np.linalg.norm(scene[:, None, :] - scene[None, :, :], axis=2)
    model_dist = np.linalg.norm(model[:, None, :] - model[None, :, :], axis=2)
    return np.abs(scene_dist - model_dist) <= epsilon


def geometric_consistency_group(
    correspondences: Sequence[Correspondence], epsilon: float = 0.01, min_size: int = 3
) -> List[Cluster]:
    """
    Greedy geometric consistency grouping of the correspondences of one model view.

    Correspondences are visited in input order. One that is not yet part of an
    accepted cluster seeds a new one, and every later unclustered correspondence
    joins if it is consistent with all current members. Clusters of at least
    ``min_size`` members are accepted, which removes their members from further
    consideration. Returns the accepted clusters, largest first, ties by seed.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    correspondences = list(correspondences)
    if not correspondences:
        return []

    consistent = consistency_matrix(correspondences, epsilon)
    taken = np.zeros(len(correspondences), dtype=bool)
    found: List[Tuple[int, List[int]]] = []
    for seed in range(len(correspondences)):
        if taken[seed]:
            continue
        members = [seed]
        for candidate in range(seed + 1, len(correspondences)):
            if not taken[candidate] and consistent[candidate, members].all():
                members.append(candidate)
        if len(members) >= min_size:
            taken[members] = True
            found.append((seed, members))

    found.sort(key=lambda item: (-len(item[1]), item[0]))
    first = correspondences[0]
    return [
        Cluster(first.model_id, first.view_id, tuple(correspondences[i] for i in members), seed)
        for seed, members in found
    ]


def split_by_view(
    correspondences: Sequence[Correspondence],
) -> Dict[Tuple[str, str], List[Correspondence]]:
    """Buckets correspondences by (model id, view id), keeping their order."""
    views: Dict[Tuple[str, str], List[Correspondence]] = defaultdict(list)
    for corr in correspondences:
        views[(corr.model_id, corr.view_id)].append(corr)
    return dict(views)


def best_clusters(
    correspondences: Sequence[Correspondence], epsilon: float = 0.01, min_size: int = 3
) -> Dict[str, Cluster]:
    """
    The largest cluster of each model over all of its views. Ties go to the view
    with the smallest id. Models without an accepted cluster are absent.
    """
    best: Dict[str, Cluster] = {}
    for (model_id, _), members in sorted(split_by_view(correspondences).items()):
        clusters = geometric_consistency_group(members, epsilon, min_size)
        if clusters and (model_id not in best or clusters[0].size > best[model_id].size):
            best[model_id] = clusters[0]
    return best
