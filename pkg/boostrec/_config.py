#!/usr/bin/python3

import json
import os
import re
import warnings
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import dotenv_values

from boostrec._expansion import expand_posix_vars
from boostrec.exceptions import BoostrecConfigWarning, ConfigValidationError

__version__ = "0.3.0"

BOOSTREC_FOLDER = Path(__file__).parent
CONFIG_NAME = "boostrec-config"

DETECTOR_NAMES = ("us", "iss", "fast")
DESCRIPTOR_NAMES = ("shot", "cshot", "fpfh", "pfhrgb")
PIPELINE_NAMES = ("LP", "Boost")
SUPPORT_MODES = ("auto", "full", "salient")


class ConfigDict(dict):
    """Dict subclass that prevents adding new keys when locked"""

    def __init__(self, values: Dict = {}) -> None:
        self._locked = False
        super().__init__()
        self.update(values)

    def __setitem__(self, key: str, value: Any) -> None:
        if self._locked and key not in self:
            raise KeyError(f"{key} is not a known config setting")
        if type(value) is dict:
            value = ConfigDict(value)
        super().__setitem__(key, value)

    def update(self, arg):  # type: ignore
        for k, v in arg.items():
            self.__setitem__(k, v)

    def _lock(self) -> None:
        """Locks the dict so that new keys cannot be added"""
        for v in [i for i in self.values() if type(i) is ConfigDict]:
            v._lock()
        self._locked = True

    def _unlock(self) -> None:
        """Unlocks the dict so that new keys can be added"""
        for v in [i for i in self.values() if type(i) is ConfigDict]:
            v._unlock()
        self._locked = False

    def _copy(self) -> Dict:
        config_copy = {}
        for key, value in self.items():
            if isinstance(value, ConfigDict):
                value = value._copy()
            config_copy[key] = value
        return config_copy


class ConfigContainer:
    def __init__(self) -> None:
        self.argv: Dict = defaultdict(lambda: None)
        self.settings = ConfigDict(_load_config(BOOSTREC_FOLDER.joinpath("data/default-config")))
        self.settings._lock()
        for folder in (Path.home(), Path(".")):
            path = _get_config_path(folder.joinpath(CONFIG_NAME))
            if path is not None:
                self.update(_load_config(path), source=path)

    def update(self, data: Dict, source: Optional[Path] = None) -> None:
        """Merges a loaded config dict over the current settings and validates the result."""
        base = source.parent if source is not None else Path(".")
        data = _expand_config_vars(data, base)
        self.settings._unlock()
        try:
            _recursive_update(self.settings, data, lock_to=self.settings)
        finally:
            self.settings._lock()
        validate_settings(self.settings)

    def reset(self) -> None:
        self.settings = ConfigDict(_load_config(BOOSTREC_FOLDER.joinpath("data/default-config")))
        self.settings._lock()
        self.argv.clear()


def _get_config_path(path: Path) -> Optional[Path]:
    if path.suffix in (".yml", ".yaml", ".json") and path.exists():
        return path
    suffix = next((i for i in (".yml", ".yaml", ".json") if path.with_suffix(i).exists()), None)
    if suffix is not None:
        return path.with_suffix(suffix)
    return None


def _load_config(path: Path) -> Dict:
    """Loads configuration data from a yaml or json file, returns as a dict"""
    config_path = _get_config_path(path)
    if config_path is None:
        return {}

    with config_path.open() as fp:
        if config_path.suffix in (".yaml", ".yml"):
            return yaml.safe_load(fp) or {}
        raw_json = fp.read()
    valid_json = re.sub(r'\/\/[^"]*?(?=\n|$)', "", raw_json)
    return json.loads(valid_json)


def load_config_file(path: Union[str, Path]) -> Dict:
    """Loads a single config file (e.g. a benchmark config) and applies it over CONFIG.

    Returns the raw data that was applied."""
    path = Path(path)
    if _get_config_path(path) is None:
        raise ConfigValidationError("config", f"config file not found: {path}")
    data = _load_config(path)
    CONFIG.update(data, source=path)
    return data


def _expand_config_vars(data: Dict, base: Path) -> Dict:
    variables = dict(os.environ)
    dotenv_path = data.get("dotenv")
    if dotenv_path:
        if not isinstance(dotenv_path, str):
            raise ConfigValidationError("dotenv", f"invalid value: {dotenv_path}")
        env_path = base.joinpath(dotenv_path)
        if not env_path.is_file():
            raise ConfigValidationError("dotenv", f"file not found at path: {env_path}")
        variables.update({k: v for k, v in dotenv_values(dotenv_path=env_path).items() if v})
    return expand_posix_vars(data, variables)


def _recursive_update(original: Dict, new: Dict, lock_to: Optional[ConfigDict] = None) -> None:
    """Recursively merges a new dict into the original dict"""
    for k in new:
        if lock_to is not None and k not in original:
            warnings.warn(f"Ignoring unknown config setting '{k}'", BoostrecConfigWarning)
            continue
        if k in original and isinstance(new[k], dict) and isinstance(original[k], dict):
            _recursive_update(original[k], new[k], lock_to)
        else:
            original[k] = new[k]


def validate_settings(settings: Dict) -> None:
    """Raises ConfigValidationError when a setting is outside its valid domain."""

    def _positive(key: str, value: Any) -> None:
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
            raise ConfigValidationError(key, f"must be a positive number, got {value!r}")

    _positive("normals.k", settings["normals"]["k"])
    if settings["normals"]["k"] < 3:
        raise ConfigValidationError("normals.k", "at least 3 neighbors are required")
    if len(settings["normals"]["viewpoint"]) != 3:
        raise ConfigValidationError("normals.viewpoint", "expected three coordinates")

    kp = settings["keypoints"]
    if parse_detector(kp["detector"])[0] not in DETECTOR_NAMES:
        raise ConfigValidationError("keypoints.detector", f"unknown detector {kp['detector']!r}")
    _positive("keypoints.us.leaf", kp["us"]["leaf"])
    for key in ("salient_radius", "nms_radius", "gamma21", "gamma32"):
        _positive(f"keypoints.iss.{key}", kp["iss"][key])
    _positive("keypoints.fast.threshold", kp["fast"]["threshold"])

    if settings["descriptors"]["family"] not in DESCRIPTOR_NAMES:
        raise ConfigValidationError(
            "descriptors.family", f"unknown descriptor {settings['descriptors']['family']!r}"
        )
    _positive("descriptors.radius", settings["descriptors"]["radius"])

    sal = settings["saliency"]
    if not 0 < sal["threshold"] < 1:
        raise ConfigValidationError("saliency.threshold", "must lie in (0, 1)")
    if not isinstance(sal["dilate_px"], int) or sal["dilate_px"] < 0:
        raise ConfigValidationError("saliency.dilate_px", "must be a non-negative integer")
    if sal["descriptor_support"] not in SUPPORT_MODES:
        raise ConfigValidationError(
            "saliency.descriptor_support", f"expected one of {', '.join(SUPPORT_MODES)}"
        )

    rec = settings["recognition"]
    _positive("recognition.epsilon", rec["epsilon"])
    _positive("recognition.database_leaf", rec["database_leaf"])
    if not isinstance(rec["min_size"], int) or rec["min_size"] < 3:
        raise ConfigValidationError("recognition.min_size", "must be an integer >= 3")
    if not isinstance(rec["workers"], int) or rec["workers"] < 1:
        raise ConfigValidationError("recognition.workers", "must be a positive integer")

    if not 0 < settings["evaluation"]["iou_min"] <= 1:
        raise ConfigValidationError("evaluation.iou_min", "must lie in (0, 1]")

    bench = settings["bench"]
    for name in bench["detectors"]:
        if parse_detector(name)[0] not in DETECTOR_NAMES:
            raise ConfigValidationError("bench.detectors", f"unknown detector {name!r}")
    for name in bench["descriptors"]:
        if name not in DESCRIPTOR_NAMES:
            raise ConfigValidationError("bench.descriptors", f"unknown descriptor {name!r}")
    for name in bench["pipelines"]:
        if name not in PIPELINE_NAMES:
            raise ConfigValidationError("bench.pipelines", f"unknown pipeline {name!r}")


def parse_detector(spec: str) -> tuple:
    """Splits a detector spec such as 'us:0.02' into ('us', {'leaf': 0.02})."""
    name, _, arg = str(spec).partition(":")
    name = name.strip().lower()
    if not arg:
        return name, {}
    if name != "us":
        raise ConfigValidationError("detector", f"detector {name!r} takes no inline argument")
    try:
        leaf = float(arg)
    except ValueError:
        raise ConfigValidationError("detector", f"invalid leaf size in {spec!r}") from None
    if leaf <= 0:
        raise ConfigValidationError("detector", f"leaf size must be positive in {spec!r}")
    return name, {"leaf": leaf}


def _update_argv_from_docopt(args: Dict) -> None:
    CONFIG.argv.update(dict((k.lstrip("-"), v) for k, v in args.items()))


warnings.filterwarnings("once", category=BoostrecConfigWarning, module="boostrec")

CONFIG = ConfigContainer()
