#!/usr/bin/python3

import cv2
import numpy as np
from scipy import fft, ndimage

from boostrec.saliency.raster import SaliencyMask

WORKING_SIZE = 64
RESIDUAL_FILTER = 3
BLUR_SIGMA = 2.5


def _grayscale(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim == 3:
        if image.shape[2] == 1:
            image = image[:, :, 0]
        else:
            image = cv2.cvtColor(image[:, :, :3].astype(np.uint8), cv2.COLOR_RGB2GRAY)
    return image.astype(np.float64)


def spectral_residual_saliency(image: np.ndarray) -> SaliencyMask:
    """
    Classical spectral-residual saliency of an RGB or grayscale raster.

    The image is reduced to 64 px on its long side. The log amplitude spectrum
    minus its 3x3 local average is recombined with the original phase,
    transformed back, squared, blurred (sigma 2.5 px) and scaled up to the input
    size. Values are min-max normalized; an image without any dynamic range
    yields an all-zero mask.
    """
    gray = _grayscale(image)
    if gray.ndim != 2 or not gray.size:
        raise ValueError(f"Expected a non-empty raster, got shape {np.shape(image)}")
    height, width = gray.shape
    if np.ptp(gray) == 0:
        return SaliencyMask(np.zeros((height, width)))

    scale = WORKING_SIZE / max(height, width)
    small_size = (max(1, round(width * scale)), max(1, round(height * scale)))
    small = cv2.resize(gray, small_size, interpolation=cv2.INTER_AREA)

    spectrum = fft.fft2(small)
    amplitude = np.abs(spectrum)
    log_amplitude = np.log(amplitude + np.finfo(np.float64).tiny)
    residual = log_amplitude - ndimage.uniform_filter(
        log_amplitude, size=RESIDUAL_FILTER, mode="nearest"
    )
    phase = np.angle(spectrum)
    saliency = np.abs(fft.ifft2(np.exp(residual + 1j * phase))) ** 2
    saliency = ndimage.gaussian_filter(saliency, sigma=BLUR_SIGMA)
    saliency = cv2.resize(saliency, (width, height), interpolation=cv2.INTER_LINEAR)

    low, high = saliency.min(), saliency.max()
    if not high > low:
        return SaliencyMask(np.zeros((height, width)))
    return SaliencyMask(np.clip((saliency - low) / (high - low), 0.0, 1.0))
