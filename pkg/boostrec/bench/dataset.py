#!/usr/bin/python3

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from boostrec._config import CONFIG
from boostrec.bench.metrics import GroundTruthEntry
from boostrec.bench.synthetic import (
    Camera,
    generate_synthetic_scene,
    random_placements,
    render_view,
    synthetic_models,
    view_poses,
)
from boostrec.cloud.datatypes import PointCloud, RigidTransform, compact, transform_cloud
from boostrec.cloud.io import CloudFormat, load_cloud, save_cloud
from boostrec.exceptions import DatasetNotFound
from boostrec.saliency.raster import BinaryMask, SaliencyMask, load_mask, save_mask

GROUND_TRUTH_NAME = "ground_truth.txt"

PathLike = Union[str, Path]
View = Tuple[str, str, PointCloud, RigidTransform]


@dataclass(eq=False)
class Dataset:

    """
    Everything a benchmark run needs: model clouds in their own frame (used for
    the bounding box overlap), training views, scenes, optional saliency masks
    and the annotated poses of each scene.
    """

    models: Dict[str, PointCloud] = field(default_factory=dict)
    views: List[View] = field(default_factory=list)
    scenes: Dict[str, PointCloud] = field(default_factory=dict)
    masks: Dict[str, Union[BinaryMask, SaliencyMask]] = field(default_factory=dict)
    ground_truth: Dict[str, List[GroundTruthEntry]] = field(default_factory=dict)

    def __repr__(self) -> str:
        return (
            f"<Dataset {len(self.models)} models, {len(self.views)} views, "
            f"{len(self.scenes)} scenes>"
        )

    @property
    def scene_ids(self) -> List[str]:
        return sorted(self.scenes)


def load_ground_truth(path: PathLike) -> Dict[str, List[GroundTruthEntry]]:
    """
    Reads a ground truth file: one entry per line, "scene model" followed by the
    12 values of the row-major 3x4 pose. Blank lines and '#' comments are skipped.
    """
    path = Path(path)
    truth: Dict[str, List[GroundTruthEntry]] = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 14:
            raise ValueError(f"{path}, line {number}: expected 14 fields, found {len(fields)}")
        try:
            pose = RigidTransform.from_matrix([float(i) for i in fields[2:]])
        except ValueError as exc:
            raise ValueError(f"{path}, line {number}: {exc}") from None
        truth.setdefault(fields[0], []).append(GroundTruthEntry(fields[0], fields[1], pose))
    return truth


def save_ground_truth(entries: List[GroundTruthEntry], path: PathLike) -> Path:
    path = Path(path)
    lines = []
    for entry in entries:
        values = " ".join(f"{i:.17g}" for i in entry.pose.as_matrix()[:3].reshape(-1))
        lines.append(f"{entry.scene_id} {entry.model_id} {values}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _view_transform(path: Path) -> RigidTransform:
    if not path.exists():
        return RigidTransform.identity()
    return RigidTransform.from_matrix(np.loadtxt(path, dtype=np.float64).reshape(-1))


def load_model_views(folder: PathLike) -> Tuple[List[View], Dict[str, PointCloud]]:
    """
    Reads training views laid out as `<model>/<view>.pcd` below ``folder``, each
    with an optional `<view>.txt` 3x4 view-to-model pose. Returns the views and
    the cloud of each model, the union of its views in the model frame.
    """
    folder = Path(folder)
    if not folder.is_dir():
        raise DatasetNotFound(f"{folder} is not a folder")
    views: List[View] = []
    models: Dict[str, PointCloud] = {}
    for model_dir in sorted(i for i in folder.iterdir() if i.is_dir()):
        merged = []
        for view_path in sorted(model_dir.glob("*.pcd")) + sorted(model_dir.glob("*.ply")):
            cloud = load_cloud(view_path)
            transform = _view_transform(view_path.with_suffix(".txt"))
            views.append((model_dir.name, view_path.stem, cloud, transform))
            merged.append(transform_cloud(compact(cloud), transform))
        if merged:
            models[model_dir.name] = PointCloud(
                np.vstack([i.xyz for i in merged]),
                rgb=np.vstack([i.rgb for i in merged]) if all(i.has_rgb for i in merged) else None,
            )
    return views, models


def load_dataset(path: PathLike) -> Dataset:
    """
    Loads a dataset directory laid out as::

        models/<model>/<view>.pcd   training views (+ optional <view>.txt 3x4 view-to-model pose)
        scenes/<scene>.pcd          organized scene clouds
        masks/<scene>.pgm           optional saliency maps, binarized per the saliency settings
        ground_truth.txt
    """
    root = Path(path)
    if not root.joinpath("models").is_dir() or not root.joinpath("scenes").is_dir():
        raise DatasetNotFound(f"{root} does not hold models/ and scenes/ folders")

    views, models = load_model_views(root.joinpath("models"))
    dataset = Dataset(models=models, views=views)

    scene_dir = root.joinpath("scenes")
    for scene_path in sorted(scene_dir.glob("*.pcd")) + sorted(scene_dir.glob("*.ply")):
        cloud = load_cloud(scene_path)
        dataset.scenes[scene_path.stem] = cloud
        mask_path = root.joinpath("masks", f"{scene_path.stem}.pgm")
        if mask_path.exists():
            size = (cloud.width, cloud.height)
            dataset.masks[scene_path.stem] = load_mask(mask_path, size)

    truth_path = root.joinpath(GROUND_TRUTH_NAME)
    if truth_path.exists():
        dataset.ground_truth = load_ground_truth(truth_path)
    for scene_id in dataset.scenes:
        dataset.ground_truth.setdefault(scene_id, [])
    return dataset


def save_dataset(dataset: Dataset, path: PathLike) -> Path:
    """Writes a dataset in the directory layout read by ``load_dataset``."""
    root = Path(path)
    for model_id, view_id, cloud, transform in dataset.views:
        folder = root.joinpath("models", model_id)
        folder.mkdir(parents=True, exist_ok=True)
        save_cloud(cloud, folder.joinpath(f"{view_id}.pcd"), CloudFormat.PCD_BINARY)
        np.savetxt(folder.joinpath(f"{view_id}.txt"), transform.as_matrix()[:3], fmt="%.17g")
    root.joinpath("scenes").mkdir(parents=True, exist_ok=True)
    for scene_id, cloud in dataset.scenes.items():
        save_cloud(cloud, root.joinpath("scenes", f"{scene_id}.pcd"), CloudFormat.PCD_BINARY)
    if dataset.masks:
        root.joinpath("masks").mkdir(parents=True, exist_ok=True)
        for scene_id, mask in dataset.masks.items():
            save_mask(mask, root.joinpath("masks", f"{scene_id}.pgm"))
    entries = [entry for key in sorted(dataset.ground_truth) for entry in dataset.ground_truth[key]]
    save_ground_truth(entries, root.joinpath(GROUND_TRUTH_NAME))
    return root


def synthetic_dataset(settings: Optional[Dict] = None, seed: Optional[int] = None) -> Dataset:
    """
    Builds the synthetic suite described by the ``synthetic`` settings: textured
    primitive models, rendered training views of each and cluttered scenes with
    a few models placed near training viewpoints, plus oracle masks.
    """
    if settings is None:
        settings = CONFIG.settings
    synth = settings["synthetic"]
    seed = synth["seed"] if seed is None else seed
    camera = Camera.from_config(settings)
    rng = np.random.default_rng(seed)

    dataset = Dataset(models=synthetic_models(int(synth["models"]), rng))
    poses = view_poses(int(synth["views_per_model"]))
    for model_id, model in dataset.models.items():
        for number, pose in enumerate(poses):
            view = render_view(model, pose, camera)
            dataset.views.append((model_id, f"view{number:02d}", view, pose.inverse()))

    low, high = synth["objects_per_scene"]
    model_ids = sorted(dataset.models)
    for number in range(int(synth["scenes"])):
        scene_id = f"scene{number:03d}"
        count = int(rng.integers(low, high + 1))
        chosen = rng.choice(model_ids, size=min(count, len(model_ids)), replace=False)
        placements = random_placements(dataset.models, list(chosen), rng, camera, poses)
        scene, truth, mask = generate_synthetic_scene(
            dataset.models,
            placements,
            clutter=int(synth["clutter"]),
            noise_sigma=float(synth["noise_sigma"]),
            seed=int(rng.integers(2**31)),
            camera=camera,
            scene_id=scene_id,
        )
        dataset.scenes[scene_id] = scene
        dataset.masks[scene_id] = mask
        dataset.ground_truth[scene_id] = truth
    return dataset
