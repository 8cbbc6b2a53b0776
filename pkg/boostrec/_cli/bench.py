#!/usr/bin/python3

from docopt import docopt

from boostrec._config import CONFIG, _update_argv_from_docopt, load_config_file
from boostrec.bench import run_benchmark, write_report
from boostrec.utils import color, notify

__doc__ = """Usage: boostrec bench [options]

Options:
  --config -c <path>        Load settings from a YAML or JSON file
  --dataset -D <path>       Dataset folder (default: bench.dataset, or the
                            synthetic suite when unset)
  --output -o <path>        Folder for the report files (default: bench.output)
  --quiet -q                Hide the progress bar
  --tb                      Show the full traceback on errors
  --raise -r                Raise exceptions instead of printing them
  --help -h                 Display this message

Runs every (detector, descriptor, pipeline) combination of the bench settings
over the dataset and writes results.csv (LP versus Boost keypoints, time and
AUC), stages.csv, pareto.csv and report.json."""


def main():
    args = docopt(__doc__)
    _update_argv_from_docopt(args)
    if args["--config"]:
        load_config_file(args["--config"])
    if args["--dataset"]:
        CONFIG.update({"bench": {"dataset": args["--dataset"]}})

    report = run_benchmark(CONFIG.settings, progress=not args["--quiet"])
    folder = args["--output"] or CONFIG.settings["bench"]["output"]
    paths = write_report(report, folder)

    print(f"\n{'detector':<10} {'descriptor':<8} {'keypoints':>10} {'time':>10} {'auc':>10}")
    for row in report.comparison_rows():
        cells = [_pct(row.get(f"{i}_pct"), i != "auc") for i in ("keypoints", "time", "auc")]
        print(f"{row['detector']:<10} {row['descriptor']:<8} {cells[0]} {cells[1]} {cells[2]}")
    print()
    notify("SUCCESS", f"Report saved at {color('bright blue')}{paths['results'].parent}{color}")


def _pct(value, lower_is_better):
    if value is None:
        return f"{'-':>10}"
    shade = "bright green" if (value < 0) == lower_is_better else "bright red"
    return f"{color(shade)}{value:>+9.2f}%{color}"
