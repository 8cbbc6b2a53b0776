#!/usr/bin/python3

from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from boostrec._config import CONFIG
from boostrec.bench.dataset import Dataset, load_dataset, synthetic_dataset
from boostrec.bench.metrics import auc, prc_sweep
from boostrec.bench.report import ComboResult, EvalReport
from boostrec.exceptions import DatasetNotFound
from boostrec.pipeline import STAGES, PipelineSettings, SceneResult, process_scene, train_database
from boostrec.recognition.database import ModelDatabase


def run_combination(
    dataset: Dataset,
    db: ModelDatabase,
    settings: PipelineSettings,
    pipeline: str,
    iou_min: float = 0.25,
    warmup: bool = True,
    progress: Optional[tqdm] = None,
) -> ComboResult:
    """
    Runs one pipeline over every scene of ``dataset``, one scene at a time,
    and averages keypoints, processed points and stage times per scene. With
    ``warmup`` the first scene is processed once beforehand and not counted.
    """
    scene_ids = dataset.scene_ids
    if not scene_ids:
        raise DatasetNotFound("Dataset holds no scenes")
    if warmup:
        first = scene_ids[0]
        process_scene(dataset.scenes[first], db, settings, pipeline, dataset.masks.get(first))

    runs: List[SceneResult] = []
    for scene_id in scene_ids:
        mask = dataset.masks.get(scene_id)
        runs.append(process_scene(dataset.scenes[scene_id], db, settings, pipeline, mask))
        if progress is not None:
            progress.update()

    sweep = prc_sweep(
        [(run.detections, dataset.ground_truth.get(i, [])) for i, run in zip(scene_ids, runs)],
        dataset.models,
        iou_min,
        start=settings.min_size,
    )
    return ComboResult(
        detector=settings.label,
        descriptor=settings.family.value,
        pipeline=pipeline,
        scenes=len(runs),
        keypoints=float(np.mean([run.keypoints for run in runs])),
        points=float(np.mean([run.points for run in runs])),
        times={stage: float(np.mean([run.times[stage] for run in runs])) for stage in STAGES},
        prc=sweep,
        auc=auc(sweep),
    )


def run_benchmark(
    settings: Optional[Dict] = None, dataset: Optional[Dataset] = None, progress: bool = True
) -> EvalReport:
    """
    Benchmarks every (detector, descriptor, pipeline) combination named in the
    ``bench`` settings over a dataset (the ``bench.dataset`` folder, or the
    synthetic suite when it is unset). A model database is trained once per
    descriptor family; training is not timed.
    """
    if settings is None:
        settings = CONFIG.settings
    bench = settings["bench"]
    if dataset is None and bench["dataset"]:
        dataset = load_dataset(bench["dataset"])
    elif dataset is None:
        dataset = synthetic_dataset(settings)
    if not dataset.scenes:
        raise DatasetNotFound("Dataset holds no scenes")
    if not dataset.views:
        raise DatasetNotFound("Dataset holds no model views")

    report = EvalReport(
        epsilon=float(settings["recognition"]["epsilon"]),
        iou_min=float(settings["evaluation"]["iou_min"]),
    )
    combos = len(bench["detectors"]) * len(bench["descriptors"]) * len(bench["pipelines"])
    with tqdm(
        total=combos * len(dataset.scenes), desc="bench", unit="scene", disable=not progress
    ) as bar:
        for family in bench["descriptors"]:
            bar.set_description(f"training {family}")
            db = train_database(
                dataset.views, PipelineSettings.from_config(settings, family=family)
            )
            for detector in bench["detectors"]:
                pipeline_settings = PipelineSettings.from_config(settings, detector, family)
                for pipeline in bench["pipelines"]:
                    bar.set_description(f"{pipeline_settings.label}/{family}/{pipeline}")
                    report.results.append(
                        run_combination(
                            dataset,
                            db,
                            pipeline_settings,
                            pipeline,
                            report.iou_min,
                            bool(bench["warmup"]),
                            bar,
                        )
                    )
    return report
