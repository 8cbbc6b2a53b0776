#!/usr/bin/python3

from .datatypes import (  # NOQA 401
    Aabb,
    Point3,
    PointCloud,
    RigidTransform,
    as_xyz,
    bounding_box,
    compact,
    transform_cloud,
)
from .io import CloudFormat, load_cloud, save_cloud  # NOQA 401
