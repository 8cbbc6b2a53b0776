#!/usr/bin/python3

from .lrf import LocalReferenceFrame, compute_lrf, compute_lrfs  # NOQA 401
from .normals import estimate_normals  # NOQA 401
from .pairs import PairFeatures, pair_features, pair_features_batch  # NOQA 401
