"""Synthetic hole mask generators.

All generators are pure functions of (shape, geometry, seed): the same seed
always yields a bit-identical mask.  Shapes extending beyond the volume are
clipped at the borders.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .core import UNKNOWN


def _empty_mask(shape: Tuple[int, int, int]) -> np.ndarray:
    if len(shape) != 3 or min(shape) < 1:
        raise ValueError(f"mask shape must be 3 positive dimensions, got {shape}")
    return np.zeros(shape, dtype=np.uint8)


def gen_diagonal_bars(
    shape: Tuple[int, int, int],
    count: int = 8,
    cross_section: Tuple[int, int] = (32, 32),
    seed: Optional[int] = None,
) -> np.ndarray:
    """Bars with a fixed spatial cross-section sliding one sample per frame
    in +x and +y, spanning all frames (no wrap-around; bars may leave the
    frame).  Anchors are drawn uniformly over the frame-0 positions where
    the cross-section fits.
    """
    frames, height, width = shape
    csx, csy = cross_section
    if csx < 1 or csy < 1:
        raise ValueError("cross-section must be positive")
    if csx > width or csy > height:
        raise ValueError(
            f"cross-section {csx}x{csy} does not fit a {width}x{height} frame"
        )
    mask = _empty_mask(shape)
    rng = np.random.default_rng(seed)
    ax = rng.integers(0, width - csx + 1, size=count)
    ay = rng.integers(0, height - csy + 1, size=count)
    for i in range(count):
        for f in range(frames):
            x0 = int(ax[i]) + f
            y0 = int(ay[i]) + f
            if x0 >= width or y0 >= height:
                break
            mask[f, y0 : min(y0 + csy, height), x0 : min(x0 + csx, width)] = UNKNOWN
    return mask


def gen_lenses(
    shape: Tuple[int, int, int],
    count: int = 30,
    spatial_radius: float = 24.0,
    temporal_radius: float = 4.0,
    seed: Optional[int] = None,
) -> np.ndarray:
    """Randomly placed ellipsoids with the given spatial and temporal
    semi-axes; centers are uniform over the sample index range."""
    frames, height, width = shape
    if spatial_radius <= 0 or temporal_radius <= 0:
        raise ValueError("lens radii must be positive")
    mask = _empty_mask(shape)
    rng = np.random.default_rng(seed)
    cx = rng.integers(0, width, size=count)
    cy = rng.integers(0, height, size=count)
    ct = rng.integers(0, frames, size=count)
    rs = float(spatial_radius)
    rt = float(temporal_radius)
    for i in range(count):
        t0 = max(0, int(np.ceil(ct[i] - rt)))
        t1 = min(frames, int(np.floor(ct[i] + rt)) + 1)
        y0 = max(0, int(np.ceil(cy[i] - rs)))
        y1 = min(height, int(np.floor(cy[i] + rs)) + 1)
        x0 = max(0, int(np.ceil(cx[i] - rs)))
        x1 = min(width, int(np.floor(cx[i] + rs)) + 1)
        t, y, x = np.ogrid[t0:t1, y0:y1, x0:x1]
        inside = (
            ((x - cx[i]) / rs) ** 2
            + ((y - cy[i]) / rs) ** 2
            + ((t - ct[i]) / rt) ** 2
        ) <= 1.0
        mask[t0:t1, y0:y1, x0:x1][inside] = UNKNOWN
    return mask


def gen_linear_bars(
    shape: Tuple[int, int, int],
    count: int = 30,
    spatial_size: Tuple[int, int] = (32, 32),
    temporal_size: int = 12,
    seed: Optional[int] = None,
) -> np.ndarray:
    """Randomly placed axis-aligned boxes of the given spatial and temporal
    extent; box centers are uniform over the sample index range."""
    frames, height, width = shape
    sx, sy = spatial_size
    st = temporal_size
    if min(sx, sy, st) < 1:
        raise ValueError("bar sizes must be positive")
    mask = _empty_mask(shape)
    rng = np.random.default_rng(seed)
    cx = rng.integers(0, width, size=count)
    cy = rng.integers(0, height, size=count)
    ct = rng.integers(0, frames, size=count)
    for i in range(count):
        t0 = int(ct[i]) - st // 2
        y0 = int(cy[i]) - sy // 2
        x0 = int(cx[i]) - sx // 2
        mask[
            max(0, t0) : min(frames, t0 + st),
            max(0, y0) : min(height, y0 + sy),
            max(0, x0) : min(width, x0 + sx),
        ] = UNKNOWN
    return mask


def hole_ratio(mask: np.ndarray) -> float:
    """Fraction of unknown samples in a mask."""
    return float(np.count_nonzero(mask == UNKNOWN)) / mask.size
