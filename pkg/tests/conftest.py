"""Shared helpers for the test suite."""

import numpy as np
import pytest

from fse3d.core import KNOWN, UNKNOWN, FseParams


def textured_volume(shape):
    """Moving sinusoidal gratings plus a gradient, clipped to [0, 255]."""
    frames, height, width = shape
    t, y, x = np.meshgrid(
        np.arange(frames), np.arange(height), np.arange(width), indexing="ij"
    )
    v = (
        110.0
        + 55.0 * np.cos(2.0 * np.pi * (x + 1.5 * t) / 12.0)
        + 35.0 * np.cos(2.0 * np.pi * (y - t) / 9.0)
        + 20.0 * np.cos(2.0 * np.pi * (x + y + 2.0 * t) / 17.0)
        + 0.15 * x
        + 0.1 * y
    )
    return np.clip(v, 0.0, 255.0)


def hole_mask(shape, *boxes):
    """Mask with the given (t, y, x) slice boxes unknown."""
    mask = np.full(shape, KNOWN, dtype=np.uint8)
    for box in boxes:
        mask[box] = UNKNOWN
    return mask


@pytest.fixture
def small_params():
    """Validation-scale geometry: 8^3 windows around 4^3 cubes."""
    return FseParams(cube_edge=4, border=2, max_iterations=20)
