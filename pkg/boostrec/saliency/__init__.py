#!/usr/bin/python3

from .filters import binarize, filter_cloud, filter_keypoints_2d  # NOQA 401
from .raster import (  # NOQA 401
    BinaryMask,
    SaliencyMask,
    load_image,
    load_mask,
    save_image,
    save_mask,
)
from .spectral import spectral_residual_saliency  # NOQA 401
