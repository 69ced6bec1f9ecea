"""Volume and mask conventions, cube partitioning, and extrapolation windows.

A video volume is a float64 array of luma samples shaped ``(frames, height,
width)``, i.e. axes ``(t, y, x)``, with values in [0, 255].  The matching
hole mask is a uint8 array of the same shape holding one of the three state
bytes below (the same encoding used by the raw mask file format).

Extrapolation windows use axis order ``(x, y, t)`` so that C-order scans of
spectra enumerate frequency triples ``(k, l, q)`` lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

# Mask state bytes.
KNOWN = 0
RECONSTRUCTED = 128
UNKNOWN = 255

_MASK_STATES = (KNOWN, RECONSTRUCTED, UNKNOWN)

# Window sample classes.
CLS_KNOWN = 0     # originally known support sample
CLS_RECON = 1     # support sample filled in an earlier step
CLS_TARGET = 2    # unknown sample inside the cube: to be filled now
CLS_EXCLUDED = 3  # unknown outside the cube, or beyond the volume bounds

_MASK_TO_CLASS = np.full(256, CLS_EXCLUDED, dtype=np.uint8)
_MASK_TO_CLASS[KNOWN] = CLS_KNOWN
_MASK_TO_CLASS[RECONSTRUCTED] = CLS_RECON
_MASK_TO_CLASS[UNKNOWN] = CLS_EXCLUDED  # promoted to CLS_TARGET inside the cube


@dataclass(frozen=True)
class FseParams:
    """Extrapolation parameters.

    cube_edge      edge length of the reconstruction cubes (samples)
    border         support border added on every side of a cube
    decay          base of the exponential distance decay of sample weights,
                   in (0, 1)
    recon_weight   extra weight multiplier for previously reconstructed
                   samples, in [0, 1]
    compensation   shrinkage applied to each projection coefficient to
                   compensate the non-orthogonality of the weighted basis,
                   in (0, 1]
    max_iterations number of basis selection iterations per cube
    fallback_value value written when a window has no support at all
    """

    cube_edge: int = 4
    border: int = 14
    decay: float = 0.7
    recon_weight: float = 0.5
    compensation: float = 0.5
    max_iterations: int = 100
    fallback_value: float = 128.0

    def __post_init__(self) -> None:
        if self.cube_edge < 1:
            raise ValueError("cube_edge must be >= 1")
        if self.border < 0:
            raise ValueError("border must be >= 0")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must be in (0, 1)")
        if not 0.0 <= self.recon_weight <= 1.0:
            raise ValueError("recon_weight must be in [0, 1]")
        if not 0.0 < self.compensation <= 1.0:
            raise ValueError("compensation must be in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def window_edge(self) -> int:
        return self.cube_edge + 2 * self.border

    @property
    def window_shape(self) -> Tuple[int, int, int]:
        """Window extent per axis, in ``(x, y, t)`` order."""
        e = self.window_edge
        return (e, e, e)


def check_volume(volume, allow_nan: bool = False) -> np.ndarray:
    """Validate and convert a video volume to a float64 ``(t, y, x)`` array."""
    v = np.asarray(volume, dtype=np.float64)
    if v.ndim != 3:
        raise ValueError(f"volume must be 3-dimensional, got shape {v.shape}")
    if min(v.shape) < 1:
        raise ValueError(f"volume dimensions must be positive, got {v.shape}")
    finite = np.isfinite(v)
    if allow_nan:
        finite |= np.isnan(v)
    if not finite.all():
        raise ValueError("volume contains non-finite samples")
    return v


def check_mask(mask, shape: Optional[Tuple[int, ...]] = None) -> np.ndarray:
    """Validate a hole mask: uint8, tri-state bytes, optional shape match."""
    m = np.asarray(mask)
    if m.ndim != 3:
        raise ValueError(f"mask must be 3-dimensional, got shape {m.shape}")
    if m.dtype != np.uint8:
        if m.dtype.kind not in "iu":
            raise ValueError(f"mask must be an integer array, got dtype {m.dtype}")
        if m.size and (m.min() < 0 or m.max() > 255):
            raise ValueError("mask values outside byte range [0, 255]")
        m = m.astype(np.uint8)
    bad = ~np.isin(m, _MASK_STATES)
    if bad.any():
        offset = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"mask contains invalid state byte {int(m.reshape(-1)[offset])} "
            f"at flat offset {offset}"
        )
    if shape is not None and m.shape != tuple(shape):
        raise ValueError(f"mask shape {m.shape} does not match volume shape {tuple(shape)}")
    return m


def check_volume_mask(volume, mask) -> Tuple[np.ndarray, np.ndarray]:
    v = check_volume(volume)
    m = check_mask(mask, shape=v.shape)
    return v, m


@dataclass
class CubeGrid:
    """Partition of a volume into cubes of edge ``cube_edge``.

    Grid arrays are indexed ``(ct, cy, cx)``; edge cubes are truncated when
    the volume dimensions are not multiples of the cube edge.
    """

    cube_edge: int
    volume_shape: Tuple[int, int, int]  # (t, y, x)
    shape: Tuple[int, int, int]         # (gt, gy, gx)
    has_unknown: np.ndarray             # bool, grid shape

    @property
    def n_cubes(self) -> int:
        return int(np.prod(self.shape))

    def cube_slices(self, index: Sequence[int]) -> Tuple[slice, slice, slice]:
        """Volume slices ``(t, y, x)`` covered by the cube at a grid index."""
        c = self.cube_edge
        return tuple(
            slice(i * c, min((i + 1) * c, dim))
            for i, dim in zip(index, self.volume_shape)
        )

    def boundary_axis_count(self, index: Sequence[int]) -> int:
        """Number of grid axes on which this cube touches the volume boundary."""
        return sum(1 for i, g in zip(index, self.shape) if i == 0 or i == g - 1)

    def scan_indices(self) -> np.ndindex:
        """All grid indices in scan order: x fastest, then y, then t."""
        return np.ndindex(self.shape)


def partition(volume, mask, cube_edge: int) -> CubeGrid:
    """Split a volume into cubes and flag those containing unknown samples."""
    v, m = check_volume_mask(volume, mask)
    if cube_edge < 1:
        raise ValueError("cube_edge must be >= 1")
    grid_shape = tuple(-(-dim // cube_edge) for dim in v.shape)
    unknown = (m == UNKNOWN)
    # Reduce over cube-aligned blocks axis by axis; reduceat keeps partial
    # edge blocks correct for dimensions not divisible by the cube edge.
    counts = unknown.astype(np.int64)
    for axis, dim in enumerate(v.shape):
        edges = np.arange(0, dim, cube_edge)
        counts = np.add.reduceat(counts, edges, axis=axis)
    return CubeGrid(
        cube_edge=cube_edge,
        volume_shape=v.shape,
        shape=grid_shape,
        has_unknown=counts > 0,
    )


@dataclass
class ExtrapolationWindow:
    """One cube plus its support border, ready for model generation.

    ``signal`` and ``classes`` are indexed ``(x, y, t)`` and always span the
    full window extent; samples beyond the volume bounds carry class
    CLS_EXCLUDED and signal 0.
    """

    cube_index: Tuple[int, int, int]
    signal: np.ndarray   # float64, window shape
    classes: np.ndarray  # uint8, window shape
    cube_window: Tuple[slice, slice, slice]  # cube box in window coords (x, y, t)
    cube_volume: Tuple[slice, slice, slice]  # cube box in volume coords (t, y, x)

    @property
    def n_targets(self) -> int:
        return int(np.count_nonzero(self.classes == CLS_TARGET))


def extract_window(volume, mask, grid: CubeGrid, cube_index, params: FseParams) -> ExtrapolationWindow:
    """Extract the classified extrapolation window centered on one cube."""
    v = volume
    m = mask
    index = tuple(int(i) for i in cube_index)
    if not grid.has_unknown[index]:
        raise ValueError(f"cube {index} has no unknown samples")
    if grid.cube_edge != params.cube_edge:
        raise ValueError("grid cube edge does not match params.cube_edge")

    edge = params.window_edge
    border = params.border
    cube_vol = grid.cube_slices(index)  # (t, y, x)

    signal = np.zeros((edge, edge, edge), dtype=np.float64)
    classes = np.full((edge, edge, edge), CLS_EXCLUDED, dtype=np.uint8)

    # Overlap of the window with the volume, axis order (t, y, x).
    win_lo = [cube_vol[a].start - border for a in range(3)]
    src = []
    dst = []
    for a in range(3):
        lo = max(win_lo[a], 0)
        hi = min(win_lo[a] + edge, v.shape[a])
        src.append(slice(lo, hi))
        dst.append(slice(lo - win_lo[a], hi - win_lo[a]))
    # Window arrays are (x, y, t): transpose the copied block.
    signal[dst[2], dst[1], dst[0]] = v[tuple(src)].transpose(2, 1, 0)
    classes[dst[2], dst[1], dst[0]] = _MASK_TO_CLASS[m[tuple(src)]].transpose(2, 1, 0)

    # Promote unknown samples inside the cube box to targets.  The box sits
    # at offset `border` on every axis; partial edge cubes shorten it.
    cube_win = tuple(
        slice(border, border + (cube_vol[a].stop - cube_vol[a].start))
        for a in (2, 1, 0)
    )
    box = classes[cube_win]
    box[box == CLS_EXCLUDED] = CLS_TARGET
    return ExtrapolationWindow(
        cube_index=index,
        signal=signal,
        classes=classes,
        cube_window=cube_win,
        cube_volume=cube_vol,
    )


def commit_cube(volume, mask, grid: CubeGrid, cube_index, values) -> int:
    """Write filled values into a cube and flip its mask states.

    ``values`` must be a 1-D array covering exactly the unknown samples of
    the cube, in C-order over the cube box in volume coordinates (t, y, x).
    Values are clamped to [0, 255] on write.  Returns the sample count.
    """
    index = tuple(int(i) for i in cube_index)
    sl = grid.cube_slices(index)
    mask_box = mask[sl]
    targets = mask_box == UNKNOWN
    n = int(np.count_nonzero(targets))
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size != n:
        raise ValueError(
            f"cube {index} has {n} unknown samples but got {values.size} values"
        )
    if n == 0:
        return 0
    vol_box = volume[sl]
    vol_box[targets] = np.clip(values, 0.0, 255.0)
    mask_box[targets] = RECONSTRUCTED
    return n
