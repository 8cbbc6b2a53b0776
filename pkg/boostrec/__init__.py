#!/usr/bin/python3

"""
isort:skip_file
"""
from boostrec._config import CONFIG as _CONFIG, __version__
from boostrec.cloud import PointCloud, RigidTransform, load_cloud, save_cloud
from boostrec.descriptors import DescriptorFamily, compute_descriptors
from boostrec.pipeline import PipelineSettings, process_scene, train_database
from boostrec.recognition import build_database, load_database, recognize, save_database
from boostrec.bench import run_benchmark

config = _CONFIG.settings

__all__ = [
    "DescriptorFamily",
    "PipelineSettings",
    "PointCloud",
    "RigidTransform",
    "__version__",
    "build_database",
    "compute_descriptors",
    "config",
    "load_cloud",
    "load_database",
    "process_scene",
    "recognize",
    "run_benchmark",
    "save_cloud",
    "save_database",
    "train_database",
]
