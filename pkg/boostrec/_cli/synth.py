#!/usr/bin/python3

from docopt import docopt

from boostrec._config import CONFIG, _update_argv_from_docopt, load_config_file
from boostrec.bench.dataset import save_dataset, synthetic_dataset
from boostrec.saliency import binarize
from boostrec.utils import color, notify

__doc__ = """Usage: boostrec synth <output> [options]

Arguments
  <output>                  Folder to write the dataset to

Options:
  --seed -s <seed>          Seed of the generator (default: synthetic.seed)
  --scenes -n <count>       Number of scenes (default: synthetic.scenes)
  --config -c <path>        Load settings from a YAML or JSON file
  --tb                      Show the full traceback on errors
  --raise -r                Raise exceptions instead of printing them
  --help -h                 Display this message

Generates textured primitive models, renders training views of each and
composes cluttered scenes, writing the dataset layout read by 'boostrec bench':
models/, scenes/, masks/ (oracle saliency maps) and ground_truth.txt. The reported
mask coverage is measured after thresholding and dilation with the saliency
settings."""


def main():
    args = docopt(__doc__)
    _update_argv_from_docopt(args)
    if args["--config"]:
        load_config_file(args["--config"])
    if args["--scenes"]:
        CONFIG.update({"synthetic": {"scenes": int(args["--scenes"])}})

    seed = int(args["--seed"]) if args["--seed"] is not None else None
    dataset = synthetic_dataset(CONFIG.settings, seed)
    path = save_dataset(dataset, args["<output>"])

    saliency = CONFIG.settings["saliency"]
    coverage = [
        binarize(mask, saliency["threshold"], saliency["dilate_px"]).coverage
        for mask in dataset.masks.values()
    ]
    notify(
        "SUCCESS",
        f"{color('bright magenta')}{len(dataset.scenes)}{color} scenes, "
        f"{len(dataset.models)} models and {len(dataset.views)} views saved at "
        f"{color('bright blue')}{path}{color}",
    )
    if coverage:
        print(f"Mean mask coverage: {sum(coverage) / len(coverage):.1%}")
