#!/usr/bin/python3

from .base import DESCRIPTOR_LENGTHS, Descriptor, DescriptorFamily, DescriptorSet  # NOQA 401
from .compute import compute_descriptors, support_radius  # NOQA 401
from .pfh import fpfh, fpfh_many, pfhrgb, pfhrgb_many, spfh_many  # NOQA 401
from .shot import cshot, shot, shot_many  # NOQA 401
