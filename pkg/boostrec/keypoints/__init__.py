#!/usr/bin/python3

from .datatypes import Keypoint2D, KeypointSet  # NOQA 401
from .fast import fast_detect, lift_to_3d  # NOQA 401
from .iss import iss_detect  # NOQA 401
from .uniform import uniform_sampling  # NOQA 401
