#!/usr/bin/python3

from .database import ModelDatabase, build_database, load_database, save_database  # NOQA 401
from .datatypes import Cluster, Correspondence, Detection, ModelView  # NOQA 401
from .grouping import best_clusters, geometric_consistency_group  # NOQA 401
from .main import detections_from_clusters, recognize  # NOQA 401
from .matching import match_scene  # NOQA 401
from .pose import estimate_pose  # NOQA 401
