#!/usr/bin/python3

from .dataset import (  # NOQA 401
    Dataset,
    load_dataset,
    load_ground_truth,
    load_model_views,
    save_dataset,
    save_ground_truth,
    synthetic_dataset,
)
from .metrics import (  # NOQA 401
    GroundTruthEntry,
    PrcPoint,
    auc,
    classify,
    detection_iou,
    prc_sweep,
    precision_recall,
)
from .report import ComboResult, EvalReport, write_report  # NOQA 401
from .runner import run_benchmark, run_combination  # NOQA 401
from .synthetic import Camera, generate_synthetic_scene, render_view  # NOQA 401
