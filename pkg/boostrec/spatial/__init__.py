#!/usr/bin/python3

from .descriptor_index import (  # NOQA 401
    DescriptorIndex,
    build_descriptor_index,
    nearest_descriptor,
)
from .kdtree import KdTree3, build_tree, gather, knn, radius_search  # NOQA 401
