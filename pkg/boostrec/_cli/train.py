#!/usr/bin/python3

from docopt import docopt
from tqdm import tqdm

from boostrec._config import _update_argv_from_docopt, load_config_file
from boostrec.bench.dataset import load_model_views
from boostrec.pipeline import PipelineSettings, describe_view
from boostrec.recognition import build_database, save_database
from boostrec.utils import color, notify

__doc__ = """Usage: boostrec train <models> <database> [options]

Arguments
  <models>                  Folder holding <model>/<view>.pcd training views
  <database>                Folder to write the model database to

Options:
  --descriptor -d <name>    Descriptor family (shot, cshot, fpfh, pfhrgb)
  --config -c <path>        Load settings from a YAML or JSON file
  --quiet -q                Hide the progress bar
  --tb                      Show the full traceback on errors
  --raise -r                Raise exceptions instead of printing them
  --help -h                 Display this message

Each view is uniformly sampled at recognition.database_leaf and described.
A <view>.txt file next to a view holds its 3x4 view-to-model pose; views
without one are taken to be in the model frame."""


def main():
    args = docopt(__doc__)
    _update_argv_from_docopt(args)
    if args["--config"]:
        load_config_file(args["--config"])

    settings = PipelineSettings.from_config(family=args["--descriptor"])
    views, _ = load_model_views(args["<models>"])
    entries = []
    for model_id, view_id, cloud, transform in tqdm(
        views, desc="describing views", unit="view", disable=args["--quiet"]
    ):
        entries.append((model_id, view_id, None, describe_view(cloud, settings), transform))
    db = build_database(entries)
    path = save_database(db, args["<database>"])

    notify(
        "SUCCESS",
        f"Database of {color('bright magenta')}{len(db.model_ids)}{color} models, "
        f"{len(db.views)} views and {len(db)} {settings.family.value} descriptors "
        f"saved at {color('bright blue')}{path}{color}",
    )