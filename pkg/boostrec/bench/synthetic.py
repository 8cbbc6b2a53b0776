#!/usr/bin/python3

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from boostrec.bench.metrics import GroundTruthEntry
from boostrec.cloud.datatypes import PointCloud, RigidTransform, bounding_box, transform_cloud
from boostrec.exceptions import OutsideFrustum, OverlappingPlacement
from boostrec.saliency.raster import SaliencyMask

# surface samples per square meter, several per pixel footprint at desk range
SURFACE_DENSITY = 150_000
TEXTURE_CELL = 0.025
PRIMITIVES = ("box", "cylinder", "cone", "steps", "wedge")
PALETTE = (
    ((220, 40, 40), (250, 220, 60)),
    ((30, 90, 200), (240, 240, 240)),
    ((40, 170, 70), (120, 40, 140)),
    ((250, 130, 20), (20, 20, 20)),
    ((200, 60, 160), (60, 200, 200)),
)

Mesh = Tuple[np.ndarray, np.ndarray]
Models = Union[Mapping[str, PointCloud], Sequence[PointCloud]]


@dataclass(frozen=True)
class Camera:

    """Pinhole camera looking down +z, image rows along +y."""

    width: int = 160
    height: int = 120
    fx: float = 150.0
    fy: float = 150.0
    cx: float = 79.5
    cy: float = 59.5

    @classmethod
    def from_config(cls, settings: Dict) -> "Camera":
        cam = settings["synthetic"]["camera"]
        return cls(
            int(cam["width"]),
            int(cam["height"]),
            float(cam["fx"]),
            float(cam["fy"]),
            float(cam["cx"]),
            float(cam["cy"]),
        )

    def project(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Pixel (row, col) of each point and whether it lands on the image in front."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        z = points[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            col = np.round(self.fx * points[:, 0] / z + self.cx)
            row = np.round(self.fy * points[:, 1] / z + self.cy)
        inside = (z > 0) & (col >= 0) & (col < self.width) & (row >= 0) & (row < self.height)
        row = np.where(inside, row, 0).astype(np.int64)
        col = np.where(inside, col, 0).astype(np.int64)
        return row, col, inside


def _box_mesh(size: Sequence[float], offset: Sequence[float] = (0, 0, 0)) -> Mesh:
    half = np.asarray(size, dtype=np.float64) / 2
    corners = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], float)
    faces = np.array(
        [
            [0, 1, 3], [0, 3, 2], [4, 6, 7], [4, 7, 5], [0, 4, 5], [0, 5, 1],
            [2, 3, 7], [2, 7, 6], [0, 2, 6], [0, 6, 4], [1, 5, 7], [1, 7, 3],
        ]
    )  # fmt: skip
    return corners * half + np.asarray(offset, dtype=np.float64), faces


def _revolved_mesh(radius: float, height: float, tip: bool, segments: int = 32) -> Mesh:
    angles = np.linspace(0, 2 * np.pi, segments, endpoint=False)
    ring = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    bottom = np.column_stack([ring, np.full(segments, -height / 2)])
    top = np.column_stack([ring * (0 if tip else 1), np.full(segments, height / 2)])
    centers = np.array([[0, 0, -height / 2], [0, 0, height / 2]])
    vertices = np.vstack([bottom, top, centers])
    faces = []
    for i in range(segments):
        j = (i + 1) % segments
        faces += [[i, j, segments + j], [i, segments + j, segments + i]]
        faces += [[2 * segments, j, i], [2 * segments + 1, segments + i, segments + j]]
    return vertices, np.array(faces)


def _wedge_mesh(size: Sequence[float]) -> Mesh:
    x, y, z = np.asarray(size, dtype=np.float64) / 2
    vertices = np.array(
        [[-x, -y, -z], [x, -y, -z], [-x, -y, z], [-x, y, -z], [x, y, -z], [-x, y, z]]
    )
    faces = np.array(
        [[0, 1, 2], [3, 5, 4], [0, 3, 4], [0, 4, 1], [0, 2, 5], [0, 5, 3], [1, 4, 5], [1, 5, 2]]
    )
    return vertices, faces


def primitive_mesh(kind: str, scale: float = 0.12) -> Mesh:
    """Triangle mesh (vertices, faces) of a named primitive about ``scale`` meters across."""
    s = scale
    if kind == "box":
        return _box_mesh((s, 0.7 * s, 0.5 * s))
    if kind == "cylinder":
        return _revolved_mesh(0.35 * s, s, tip=False)
    if kind == "cone":
        return _revolved_mesh(0.45 * s, s, tip=True)
    if kind == "steps":
        lower, lower_faces = _box_mesh((s, 0.6 * s, 0.3 * s), (0, 0, -0.15 * s))
        upper, upper_faces = _box_mesh((0.5 * s, 0.6 * s, 0.3 * s), (0.25 * s, 0, 0.15 * s))
        return np.vstack([lower, upper]), np.vstack([lower_faces, upper_faces + len(lower)])
    if kind == "wedge":
        return _wedge_mesh((s, 0.8 * s, 0.6 * s))
    raise ValueError(f"Unknown primitive '{kind}', expected one of {', '.join(PRIMITIVES)}")


def sample_surface(mesh: Mesh, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random points on the surface of a triangle mesh."""
    vertices, faces = mesh
    a, b, c = (vertices[faces[:, i]] for i in range(3))
    areas = np.linalg.norm(np.cross(b - a, c - a), axis=1) / 2
    chosen = rng.choice(len(faces), size=count, p=areas / areas.sum())
    r1 = np.sqrt(rng.random(count))[:, None]
    r2 = rng.random(count)[:, None]
    return (1 - r1) * a[chosen] + r1 * (1 - r2) * b[chosen] + r1 * r2 * c[chosen]


def checker_colors(points: np.ndarray, colors: Tuple[Tuple[int, ...], ...]) -> np.ndarray:
    """Two-colour 3D checkerboard texture of cell TEXTURE_CELL."""
    cells = np.floor(points / TEXTURE_CELL).astype(np.int64).sum(axis=1) % 2
    return np.array(colors, dtype=np.uint8)[cells]


def make_model(
    kind: str, rng: np.random.Generator, scale: float = 0.12, palette: int = 0
) -> PointCloud:
    """Textured point model of a primitive, centred on its bounding box."""
    mesh = primitive_mesh(kind, scale)
    vertices, faces = mesh
    a, b, c = (vertices[faces[:, i]] for i in range(3))
    area = float((np.linalg.norm(np.cross(b - a, c - a), axis=1) / 2).sum())
    points = sample_surface(mesh, int(area * SURFACE_DENSITY), rng)
    points -= (points.min(axis=0) + points.max(axis=0)) / 2
    return PointCloud(points, rgb=checker_colors(points, PALETTE[palette % len(PALETTE)]))


def synthetic_models(count: int, rng: np.random.Generator) -> Dict[str, PointCloud]:
    """``count`` distinct textured models named "model0", "model1", ..."""
    models = {}
    for i in range(count):
        kind = PRIMITIVES[i % len(PRIMITIVES)]
        scale = 0.10 + 0.04 * rng.random()
        models[f"model{i}"] = make_model(kind, rng, scale, palette=i)
    return models


def render(
    points: np.ndarray,
    colors: np.ndarray,
    camera: Camera,
    labels: Optional[np.ndarray] = None,
) -> Tuple[PointCloud, np.ndarray]:
    """
    Renders camera-frame points into an organized cloud with a z-buffer: each
    pixel keeps its nearest point, ties going to the lowest point index.

    Returns the cloud and a (height, width) array with the label of the point
    seen at each pixel (-1 where nothing was rendered).
    """
    if labels is None:
        labels = np.zeros(len(points), dtype=np.int64)
    row, col, inside = camera.project(points)
    index = np.flatnonzero(inside)
    pixel = row[index] * camera.width + col[index]
    order = np.lexsort((index, points[index, 2], pixel))
    first = np.ones(len(order), dtype=bool)
    first[1:] = pixel[order][1:] != pixel[order][:-1]
    winners = index[order][first]
    pixels = pixel[order][first]

    size = camera.width * camera.height
    xyz = np.full((size, 3), np.nan)
    rgb = np.zeros((size, 3), dtype=np.uint8)
    owner = np.full(size, -1, dtype=np.int64)
    xyz[pixels] = points[winners]
    rgb[pixels] = colors[winners]
    owner[pixels] = labels[winners]
    cloud = PointCloud(xyz, camera.width, camera.height, rgb=rgb)
    return cloud, owner.reshape(camera.height, camera.width)


def render_view(model: PointCloud, pose: RigidTransform, camera: Camera) -> PointCloud:
    """2.5D view of a model placed in front of the camera with ``pose`` (model to camera)."""
    posed = pose.apply(model.xyz[model.valid])
    colors = model.rgb[model.valid] if model.rgb is not None else np.zeros(posed.shape, np.uint8)
    return render(posed, colors, camera)[0]


def view_poses(count: int, distance: float = 0.6, tilt: float = 25.0) -> List[RigidTransform]:
    """Model-to-camera poses looking at the origin from ``count`` directions around it."""
    return [
        RigidTransform.from_euler((tilt, 360.0 * i / count, 0.0), (0.0, 0.0, distance))
        for i in range(count)
    ]


def generate_synthetic_scene(
    models: Models,
    placements: Sequence[Tuple[str, RigidTransform]],
    clutter: int = 0,
    noise_sigma: float = 0.0,
    seed: int = 0,
    camera: Optional[Camera] = None,
    scene_id: str = "scene",
) -> Tuple[PointCloud, List[GroundTruthEntry], SaliencyMask]:
    """
    Renders placed models and random clutter into an organized scene cloud.

    Arguments
    ---------
    models : mapping or sequence of PointCloud
        Model clouds in their own frame, keyed by model id (a sequence is keyed
        by position).
    placements : sequence of (model id, RigidTransform)
        Pose of each placed model in the camera frame.
    clutter : int
        Number of uniformly distributed clutter points behind the objects.
    noise_sigma : float
        Standard deviation (meters) of gaussian noise added to every coordinate.
    seed : int
        Seed of the random generator, the output is a function of the inputs.

    Returns
    -------
    PointCloud
        Organized scene cloud.
    list of GroundTruthEntry
        Annotated pose of every placement.
    SaliencyMask
        Oracle saliency: 1 on pixels showing a placed model, 0 elsewhere.
    """
    camera = camera or Camera()
    if not isinstance(models, Mapping):
        models = {str(i): model for i, model in enumerate(models)}
    rng = np.random.default_rng(seed)

    boxes = []
    for model_id, pose in placements:
        if model_id not in models:
            raise KeyError(f"Unknown model '{model_id}'")
        posed = transform_cloud(models[model_id], pose)
        if not camera.project(posed.xyz[posed.valid])[2].all():
            raise OutsideFrustum(f"Model '{model_id}' is not fully inside the camera frustum")
        box = bounding_box(posed)
        for other_id, other in boxes:
            if box.overlaps(other):
                raise OverlappingPlacement(
                    f"Placements of '{other_id}' and '{model_id}' overlap"
                )
        boxes.append((model_id, box))

    points, colors, labels = [], [], []
    for number, (model_id, pose) in enumerate(placements):
        model = models[model_id]
        points.append(pose.apply(model.xyz[model.valid]))
        rgb = model.rgb[model.valid] if model.rgb is not None else None
        colors.append(rgb if rgb is not None else np.full((len(points[-1]), 3), 128, np.uint8))
        labels.append(np.full(len(points[-1]), number, dtype=np.int64))

    if clutter:
        depth = max([box.max[2] for _, box in boxes], default=0.8) + 0.1
        far = depth + 0.3
        half_x = (camera.width / 2) / camera.fx * far
        half_y = (camera.height / 2) / camera.fy * far
        low, high = np.array([-half_x, -half_y, depth]), np.array([half_x, half_y, far])
        points.append(rng.uniform(low, high, (clutter, 3)))
        colors.append(rng.integers(0, 256, (clutter, 3), dtype=np.uint8))
        labels.append(np.full(clutter, -1, dtype=np.int64))

    if not points:
        points, colors, labels = [np.zeros((0, 3))], [np.zeros((0, 3), np.uint8)], [np.zeros(0)]
    xyz = np.vstack(points)
    if noise_sigma > 0:
        xyz = xyz + rng.normal(0.0, noise_sigma, xyz.shape)
    scene, owner = render(
        xyz, np.vstack(colors), camera, np.concatenate(labels).astype(np.int64)
    )
    mask = SaliencyMask((owner >= 0).astype(np.float64))
    truth = [GroundTruthEntry(scene_id, model_id, pose) for model_id, pose in placements]
    return scene, truth, mask


def random_placements(
    models: Mapping[str, PointCloud],
    chosen: Sequence[str],
    rng: np.random.Generator,
    camera: Camera,
    orientations: Sequence[RigidTransform] = (),
    attempts: int = 200,
) -> List[Tuple[str, RigidTransform]]:
    """
    Non-overlapping placements of the ``chosen`` models, fully inside the frustum.

    When ``orientations`` are given each model is shown close to one of them
    (spun about the optical axis and jittered by a few degrees), so the scene
    views resemble the training views.
    """
    placements: List[Tuple[str, RigidTransform]] = []
    boxes = []
    for model_id in chosen:
        model = models[model_id]
        for _ in range(attempts):
            if orientations:
                base = orientations[rng.integers(len(orientations))].rotation
                spin = RigidTransform.from_euler(
                    (rng.normal(0, 3), rng.normal(0, 3), rng.uniform(-180, 180))
                ).rotation
                rotation = spin @ base
            else:
                rotation = RigidTransform.random(rng).rotation
            depth = rng.uniform(0.55, 0.8)
            half_x = (camera.width / 2 - 15) / camera.fx * depth
            half_y = (camera.height / 2 - 15) / camera.fy * depth
            translation = (rng.uniform(-half_x, half_x), rng.uniform(-half_y, half_y), depth)
            pose = RigidTransform(rotation, translation)
            posed = transform_cloud(model, pose)
            if not camera.project(posed.xyz[posed.valid])[2].all():
                continue
            box = bounding_box(posed)
            if any(box.overlaps(other) for other in boxes):
                continue
            placements.append((model_id, pose))
            boxes.append(box)
            break
    return placements
