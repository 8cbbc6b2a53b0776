#!/usr/bin/python3

import difflib
import importlib
import sys
from pathlib import Path

from docopt import docopt

from boostrec._config import CONFIG, __version__
from boostrec.exceptions import DatasetNotFound
from boostrec.utils import color, notify

__doc__ = """Usage:  boostrec <command> [<args>...] [options <args>]

Commands:
  train              Build a model database from training views
  recognize          Recognize database models in a scene cloud
  saliency           Compute a saliency mask for an image or organized cloud
  synth              Generate a synthetic dataset with ground truth and masks
  bench              Benchmark the LP and Boost pipelines
  eval               Score detections against ground truth (PRC and AUC)

Options:
  --help -h          Display this message
  --version          Show version and exit

Type 'boostrec <command> --help' for specific options and more information about
each command."""


def main():

    print(f"boostrec v{__version__} - saliency boosted 3D object recognition\n")

    if "--version" in sys.argv:
        sys.exit()

    if len(sys.argv) < 2 or sys.argv[1].startswith("-"):
        # this call triggers a SystemExit
        docopt(__doc__, ["-h"])

    cmd = sys.argv[1]
    cmd_list = [i.stem for i in Path(__file__).parent.glob("[!_]*.py")]
    if cmd not in cmd_list:
        close = difflib.get_close_matches(cmd, cmd_list, n=1, cutoff=0.8)
        if close:
            sys.exit(f"Invalid command. Did you mean 'boostrec {close[0]}'?")
        sys.exit("Invalid command. Try 'boostrec --help' for available commands.")

    CONFIG.argv["cli"] = cmd

    try:
        importlib.import_module(f"boostrec._cli.{cmd}").main()
    except DatasetNotFound as e:
        notify("ERROR", str(e))
        sys.exit("Type 'boostrec synth <folder>' to generate a synthetic dataset.")
    except Exception as e:
        if "-r" in sys.argv or "--raise" in sys.argv:
            raise e
        else:
            sys.exit(color.format_tb(e))
