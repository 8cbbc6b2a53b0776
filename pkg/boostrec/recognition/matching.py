#!/usr/bin/python3

from typing import List

from boostrec.descriptors.base import DescriptorSet
from boostrec.exceptions import DescriptorFamilyMismatch
from boostrec.recognition.database import ModelDatabase
from boostrec.recognition.datatypes import Correspondence


def match_scene(
    scene: DescriptorSet, db: ModelDatabase, workers: int = 1
) -> List[Correspondence]:
    """
    Pairs every described scene keypoint with its nearest database descriptor
    over all views of all models. There is no distance cutoff; rows flagged as
    empty are not matched.
    """
    if scene.family != db.family:
        raise DescriptorFamilyMismatch(
            f"Scene holds {scene.family.value} descriptors, database holds {db.family.value}"
        )
    scene = scene.only_valid()
    if not len(scene) or not len(db):
        return []

    rows, dist = db.index.nearest_rows(scene.values, workers)
    matches = []
    for i, (row, distance) in enumerate(zip(rows, dist)):
        model_id, view_id, keypoint = db.index.provenance[row]
        matches.append(
            Correspondence(
                int(scene.indices[i]),
                scene.positions[i],
                model_id,
                view_id,
                keypoint,
                db.keypoint(model_id, view_id, keypoint),
                float(distance),
            )
        )
    return matches
