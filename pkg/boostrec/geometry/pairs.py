#!/usr/bin/python3

from typing import NamedTuple

import numpy as np

from boostrec.exceptions import DegeneratePair

# cross products shorter than this leave the Darboux frame undefined
DEGENERATE_NORM = 1e-12


class PairFeatures(NamedTuple):
    """Darboux-frame angles (radians) and distance (meters) between two oriented points."""

    alpha: float
    phi: float
    theta: float
    d: float


class PairBatch(NamedTuple):
    alpha: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    d: np.ndarray
    valid: np.ndarray
    swapped: np.ndarray


def pair_features_batch(
    p_s: np.ndarray, n_s: np.ndarray, p_t: np.ndarray, n_t: np.ndarray
) -> PairBatch:
    """
    Vectorised pair features over row-aligned arrays of shape (n, 3).

    For each pair the source is the point whose normal makes the smaller angle
    with the connecting line; ``swapped`` marks the rows where that is the
    second point. Coincident points and pairs with a normal parallel to the
    connecting line are flagged in ``valid`` and carry NaN features.
    """
    p_s, n_s, p_t, n_t = (
        np.asarray(i, dtype=np.float64).reshape(-1, 3) for i in (p_s, n_s, p_t, n_t)
    )
    delta = p_t - p_s
    d = np.linalg.norm(delta, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = delta / d[:, None]
        angle_s = np.arccos(np.clip(np.abs(np.einsum("ij,ij->i", n_s, direction)), 0, 1))
        angle_t = np.arccos(np.clip(np.abs(np.einsum("ij,ij->i", n_t, direction)), 0, 1))
        swapped = angle_s > angle_t

        u = np.where(swapped[:, None], n_t, n_s)
        target = np.where(swapped[:, None], n_s, n_t)
        direction = np.where(swapped[:, None], -direction, direction)

        v = np.cross(u, direction)
        v_norm = np.linalg.norm(v, axis=1)
        valid = (d > 0) & (v_norm > DEGENERATE_NORM)
        v = v / v_norm[:, None]
        w = np.cross(u, v)

        alpha = np.arccos(np.clip(np.einsum("ij,ij->i", v, target), -1, 1))
        phi = np.arccos(np.clip(np.einsum("ij,ij->i", u, direction), -1, 1))
        theta = np.arctan2(np.einsum("ij,ij->i", w, target), np.einsum("ij,ij->i", u, target))
    theta[theta <= -np.pi] = np.pi
    for values in (alpha, phi, theta):
        values[~valid] = np.nan
    return PairBatch(alpha, phi, theta, d, valid, swapped)


def pair_features(
    p_s: np.ndarray, n_s: np.ndarray, p_t: np.ndarray, n_t: np.ndarray
) -> PairFeatures:
    """Pair features of two oriented points.

    Raises DegeneratePair for coincident points or when the Darboux frame is
    undefined."""
    for normal in (n_s, n_t):
        if not np.isfinite(np.asarray(normal, dtype=np.float64)).all():
            raise DegeneratePair("Both points need a valid normal")
    batch = pair_features_batch(p_s, n_s, p_t, n_t)
    if not batch.d[0] > 0:
        raise DegeneratePair("Coincident points have no pair features")
    if not batch.valid[0]:
        raise DegeneratePair("Source normal is parallel to the connecting line")
    return PairFeatures(*(float(i[0]) for i in batch[:4]))
