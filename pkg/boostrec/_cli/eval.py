#!/usr/bin/python3

import json
from pathlib import Path

from docopt import docopt

from boostrec._config import CONFIG, _update_argv_from_docopt
from boostrec.bench import auc, classify, load_ground_truth, load_model_views, prc_sweep
from boostrec.recognition import Detection
from boostrec.utils import color

__doc__ = """Usage: boostrec eval <models> <ground_truth> <detections>... [options]

Arguments
  <models>                  Folder holding <model>/<view>.pcd training views
  <ground_truth>            Ground truth file (scene model + 3x4 pose per line)
  <detections>...           JSON files written by 'boostrec recognize --output'

Options:
  --iou <value>             Minimum overlap of a correct detection
  --start <count>           First support threshold of the sweep [default: 3]
  --tb                      Show the full traceback on errors
  --raise -r                Raise exceptions instead of printing them
  --help -h                 Display this message

Classifies the detections of each scene, sweeps the support threshold and
prints the precision-recall points and the area under the curve. The model
clouds used for the bounding box overlap are the union of their views."""


def main():
    args = docopt(__doc__)
    _update_argv_from_docopt(args)
    iou_min = float(args["--iou"] or CONFIG.settings["evaluation"]["iou_min"])

    _, models = load_model_views(args["<models>"])
    truth = load_ground_truth(args["<ground_truth>"])
    scenes = {}
    for path in args["<detections>"]:
        data = json.loads(Path(path).read_text())
        scenes[data["scene"]] = [Detection.from_dict(i) for i in data["detections"]]

    per_scene = {}
    for scene_id in sorted(set(scenes) | set(truth)):
        result = classify(scenes.get(scene_id, []), truth.get(scene_id, []), models, iou_min)
        per_scene[scene_id] = {"tp": result.tp, "fp": result.fp, "fn": result.fn}

    pairs = [(scenes.get(i, []), truth.get(i, [])) for i in sorted(set(scenes) | set(truth))]
    sweep = prc_sweep(pairs, models, iou_min, start=int(args["--start"]))
    output = {
        "iou_min": iou_min,
        "scenes": per_scene,
        "prc": [point._asdict() for point in sweep],
        "auc": auc(sweep),
    }
    print(color.json(output))
