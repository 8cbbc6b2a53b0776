#!/usr/bin/python3

import sys
from copy import deepcopy

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import boostrec
from boostrec.bench.dataset import synthetic_dataset
from boostrec.bench.synthetic import Camera, make_model, render_view, view_poses
from boostrec.cloud import PointCloud

settings.register_profile(
    "boostrec",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("boostrec")


def pytest_addoption(parser):
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="Run the end-to-end acceptance runs over the synthetic suite.",
    )


# remove slow tests unless --slow is given
def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


# configuration fixtures
# changes to config or argv are reverted during teardown


@pytest.fixture
def config():

    conf = boostrec._config.CONFIG
    argv = deepcopy(dict(conf.argv))
    settings = conf.settings._copy()

    yield conf

    conf.argv.clear()
    conf.argv.update(argv)

    conf.settings._unlock()
    conf.settings.clear()
    conf.settings.update(settings)
    conf.settings._lock()


@pytest.fixture
def argv():
    initial = {}
    initial.update(boostrec._config.CONFIG.argv)
    original = sys.argv.copy()
    yield boostrec._config.CONFIG.argv
    boostrec._config.CONFIG.argv.clear()
    boostrec._config.CONFIG.argv.update(initial)
    sys.argv = original


@pytest.fixture
def rng():
    return np.random.default_rng(31337)


# canonical clouds


@pytest.fixture
def plane():
    """21x21 grid with 5 mm spacing on the plane z = 0.6."""
    u, v = np.meshgrid(np.arange(21) * 0.005, np.arange(21) * 0.005)
    xyz = np.column_stack([u.ravel() - 0.05, v.ravel() - 0.05, np.full(u.size, 0.6)])
    return PointCloud(xyz)


@pytest.fixture
def organized():
    """4x3 organized cloud with RGB and one invalid pixel at (1, 2)."""
    xyz = np.array([[c * 0.01, r * 0.01, 0.5] for r in range(3) for c in range(4)])
    xyz[1 * 4 + 2] = np.nan
    rgb = np.arange(36, dtype=np.uint8).reshape(12, 3)
    return PointCloud(xyz, width=4, height=3, rgb=rgb)


def _sphere(count, rng, radius=0.05, center=(0.0, 0.0, 0.6)):
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    return directions * radius + np.asarray(center)


@pytest.fixture
def sphere(rng):
    xyz = _sphere(3000, rng)
    rgb = rng.integers(0, 256, (len(xyz), 3), dtype=np.uint8)
    return PointCloud(xyz, rgb=rgb)


# synthetic data, shared across a session since rendering is not free


def _small_settings():
    settings = boostrec._config.CONFIG.settings._copy()
    settings["synthetic"].update(
        {
            "seed": 7,
            "models": 2,
            "scenes": 2,
            "views_per_model": 4,
            "objects_per_scene": [1, 2],
            "clutter": 500,
        }
    )
    return settings


@pytest.fixture(scope="session")
def small_settings():
    return _small_settings()


@pytest.fixture(scope="session")
def small_dataset():
    return synthetic_dataset(_small_settings())


@pytest.fixture(scope="session")
def model_view():
    """A textured box and one rendered view of it: (model, view cloud, model-to-camera pose)."""
    model = make_model("box", np.random.default_rng(3), scale=0.12, palette=1)
    pose = view_poses(6)[1]
    return model, render_view(model, pose, Camera()), pose
