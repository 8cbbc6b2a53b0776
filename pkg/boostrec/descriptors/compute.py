#!/usr/bin/python3

from typing import Any, Union

import numpy as np

from boostrec.cloud.datatypes import PointCloud
from boostrec.descriptors.base import DescriptorFamily, DescriptorSet, require_color
from boostrec.descriptors.pfh import fpfh_many, pfhrgb_many
from boostrec.descriptors.shot import shot_many
from boostrec.spatial.kdtree import KdTree3


def support_radius(family: Union[DescriptorFamily, str], radius: float) -> float:
    """Radius around the keypoints inside which normals are needed."""
    # FPFH also reads the neighbours' own neighbourhoods
    return 2 * radius if DescriptorFamily(family) == DescriptorFamily.FPFH else radius


def compute_descriptors(
    family: Union[DescriptorFamily, str],
    cloud: PointCloud,
    tree: KdTree3,
    indices: Any,
    radius: float = 0.05,
) -> DescriptorSet:
    """
    Describes the points ``indices`` of ``cloud`` with one descriptor family.

    ``cloud`` must carry normals (at least around the keypoints) and RGB data
    for the colour families. ``tree`` indexes ``cloud``.
    """
    family = DescriptorFamily(family)
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if family.needs_color:
        require_color(cloud, family)
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if not len(indices):
        return DescriptorSet.empty(family)

    if family == DescriptorFamily.SHOT:
        values, valid = shot_many(cloud, tree, indices, radius, color=False)
    elif family == DescriptorFamily.CSHOT:
        values, valid = shot_many(cloud, tree, indices, radius, color=True)
    elif family == DescriptorFamily.FPFH:
        values, valid = fpfh_many(cloud, tree, indices, radius)
    else:
        values, valid = pfhrgb_many(cloud, tree, indices, radius)
    return DescriptorSet(family, values, indices, cloud.xyz[indices], valid)
