#!/usr/bin/python3

from pathlib import Path

from docopt import docopt

from boostrec._config import CONFIG, _update_argv_from_docopt
from boostrec.cloud import load_cloud
from boostrec.saliency import binarize, load_image, save_mask, spectral_residual_saliency
from boostrec.utils import color, notify

CLOUD_SUFFIXES = (".pcd", ".ply")

__doc__ = """Usage: boostrec saliency <image> <output> [options]

Arguments
  <image>                   Image file, or an organized cloud (PCD/PLY) whose
                            registered colours are used
  <output>                  Path of the PGM mask to write

Options:
  --threshold -t <value>    Binarization threshold in (0, 1)
  --dilate -d <px>          Dilation radius of the salient region in pixels
  --raw                     Write the continuous map instead of a binary mask
  --tb                      Show the full traceback on errors
  --raise -r                Raise exceptions instead of printing them
  --help -h                 Display this message

Computes a spectral residual saliency map of the image. Unless --raw is given
the map is thresholded and dilated (saliency.threshold and saliency.dilate_px
by default)."""


def main():
    args = docopt(__doc__)
    _update_argv_from_docopt(args)

    source = Path(args["<image>"])
    if source.suffix.lower() in CLOUD_SUFFIXES:
        image = load_cloud(source).image()
    else:
        image = load_image(source)
    saliency = spectral_residual_saliency(image)

    if args["--raw"]:
        path = save_mask(saliency, args["<output>"])
        notify("SUCCESS", f"Saliency map saved at {color('bright blue')}{path}{color}")
        return

    settings = CONFIG.settings["saliency"]
    threshold = float(args["--threshold"] or settings["threshold"])
    dilate = int(args["--dilate"] if args["--dilate"] is not None else settings["dilate_px"])
    mask = binarize(saliency, threshold, dilate)
    path = save_mask(mask, args["<output>"])
    notify(
        "SUCCESS",
        f"Mask covering {color('bright magenta')}{mask.coverage:.1%}{color} of the "
        f"{mask.width}x{mask.height} frame saved at {color('bright blue')}{path}{color}",
    )
