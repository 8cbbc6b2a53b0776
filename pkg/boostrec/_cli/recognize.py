#!/usr/bin/python3

import json
from pathlib import Path

from docopt import docopt

from boostrec._config import CONFIG, _update_argv_from_docopt, load_config_file
from boostrec.cloud import load_cloud
from boostrec.pipeline import PipelineSettings, process_scene
from boostrec.recognition import load_database
from boostrec.saliency import load_mask
from boostrec.utils import color, notify

__doc__ = """Usage: boostrec recognize <scene> <database> [options]

Arguments
  <scene>                   Organized scene cloud (PCD or PLY)
  <database>                Model database folder written by 'boostrec train'

Options:
  --detector -k <spec>      Keypoint detector (us, us:<leaf>, iss, fast)
  --leaf <meters>           Uniform sampling leaf size
  --iss-salient-radius <m>  ISS scatter matrix radius
  --iss-nms-radius <m>      ISS non-maximum suppression radius
  --fast-threshold <level>  FAST intensity threshold
  --descriptor -d <name>    Descriptor family (default: the database's)
  --desc-radius <meters>    Descriptor support radius
  --boost -b                Filter the scene with a saliency mask first
  --mask -m <path>          PGM saliency mask (default: spectral residual map)
  --threshold -t <value>    Saliency threshold in (0, 1)
  --dilate <pixels>         Dilation radius of the salient region
  --output -o <path>        Write the detections to a JSON file
  --config -c <path>        Load settings from a YAML or JSON file
  --tb                      Show the full traceback on errors
  --raise -r                Raise exceptions instead of printing them
  --help -h                 Display this message

Runs the local descriptor pipeline on one scene and prints one detection per
recognized model: its pose (4x4, model frame to scene frame) and support.
Command line values override the config; a descriptor differing from the
database's raises DescriptorFamilyMismatch."""

OVERRIDES = {
    "--leaf": (("keypoints", "us", "leaf"), float),
    "--iss-salient-radius": (("keypoints", "iss", "salient_radius"), float),
    "--iss-nms-radius": (("keypoints", "iss", "nms_radius"), float),
    "--fast-threshold": (("keypoints", "fast", "threshold"), int),
    "--desc-radius": (("descriptors", "radius"), float),
    "--threshold": (("saliency", "threshold"), float),
    "--dilate": (("saliency", "dilate_px"), int),
}


def _apply_overrides(args):
    data = {}
    for option, (keys, cast) in OVERRIDES.items():
        if args[option] is None:
            continue
        target = data
        for key in keys[:-1]:
            target = target.setdefault(key, {})
        target[keys[-1]] = cast(args[option])
    if data:
        CONFIG.update(data)


def main():
    args = docopt(__doc__)
    _update_argv_from_docopt(args)
    if args["--config"]:
        load_config_file(args["--config"])
    _apply_overrides(args)

    db = load_database(args["<database>"])
    family = args["--descriptor"] or db.family.value
    settings = PipelineSettings.from_config(detector=args["--detector"], family=family)
    scene = load_cloud(args["<scene>"])
    mask = None
    if args["--mask"]:
        mask = load_mask(args["--mask"], (scene.width, scene.height))
    pipeline = "Boost" if args["--boost"] or mask is not None else "LP"

    result = process_scene(scene, db, settings, pipeline, mask)
    output = {
        "scene": Path(args["<scene>"]).stem,
        "pipeline": pipeline,
        "detector": settings.label,
        "descriptor": settings.family.value,
        "keypoints": result.keypoints,
        "times": result.times,
        "detections": [det.as_dict() for det in result.detections],
    }
    print(color.json(output))

    if args["--output"]:
        Path(args["--output"]).write_text(json.dumps(output, indent=2))
        notify("SUCCESS", f"Detections saved at {color('bright blue')}{args['--output']}{color}")
