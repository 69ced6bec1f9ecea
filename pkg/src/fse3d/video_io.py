"""Raw headerless video and mask file I/O, plus order-map image export.

Video files carry no header; dimensions come from the caller.  Two pixel
formats are supported: ``y8`` (one luma byte per sample) and ``yuv420p``
(planar 4:2:0, of which only the luma plane is processed; chroma is passed
through untouched on write).  Mask files hold one state byte per sample in
the same frame order: 0 known, 255 unknown, 128 reconstructed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .core import check_mask, check_volume

PIXEL_FORMATS = ("y8", "yuv420p")

ORDER_MAP_RESERVED = 255  # byte for samples outside any processed hole cube


@dataclass(frozen=True)
class RawVideoSpec:
    """Dimensions and layout of one headerless raw video file."""

    path: str
    width: int
    height: int
    frames: Optional[int] = None  # None: as many frames as the file holds
    pixel_format: str = "y8"

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be positive, got {self.width}x{self.height}")
        if self.frames is not None and self.frames < 1:
            raise ValueError("frame count must be positive")
        if self.pixel_format not in PIXEL_FORMATS:
            raise ValueError(
                f"unknown pixel format {self.pixel_format!r}; expected one of {PIXEL_FORMATS}"
            )
        if self.pixel_format == "yuv420p" and (self.width % 2 or self.height % 2):
            raise ValueError("yuv420p requires even width and height")

    @property
    def luma_bytes(self) -> int:
        return self.width * self.height

    @property
    def frame_bytes(self) -> int:
        if self.pixel_format == "yuv420p":
            return self.luma_bytes * 3 // 2
        return self.luma_bytes


def _frame_count(spec: RawVideoSpec, file_size: int) -> int:
    if file_size == 0:
        raise ValueError(f"{spec.path}: file is empty")
    if file_size % spec.frame_bytes:
        raise ValueError(
            f"{spec.path}: size {file_size} is not a multiple of the "
            f"{spec.frame_bytes}-byte frame ({spec.width}x{spec.height} {spec.pixel_format}); "
            f"{file_size % spec.frame_bytes} trailing bytes"
        )
    available = file_size // spec.frame_bytes
    if spec.frames is None:
        return available
    if spec.frames > available:
        raise ValueError(
            f"{spec.path}: requested {spec.frames} frames but file ends at byte "
            f"{file_size} ({available} frames)"
        )
    return spec.frames


def read_volume(spec: RawVideoSpec) -> np.ndarray:
    """Load the luma plane of every frame as a float64 ``(t, y, x)`` volume."""
    size = os.path.getsize(spec.path)
    frames = _frame_count(spec, size)
    raw = np.fromfile(spec.path, dtype=np.uint8, count=frames * spec.frame_bytes)
    planes = raw.reshape(frames, spec.frame_bytes)[:, : spec.luma_bytes]
    return planes.reshape(frames, spec.height, spec.width).astype(np.float64)


def quantize(volume: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to bytes."""
    v = np.clip(volume, 0.0, 255.0)
    return np.floor(v + 0.5).astype(np.uint8)


def write_volume(volume, spec: RawVideoSpec, chroma_from: Optional[str] = None) -> None:
    """Write a volume to a raw file per the spec's pixel format.

    For yuv420p, chroma planes are copied frame-by-frame from
    ``chroma_from`` (typically the input file); without a source they are
    filled with neutral 128.
    """
    v = check_volume(volume)
    frames = v.shape[0]
    if (v.shape[2], v.shape[1]) != (spec.width, spec.height):
        raise ValueError(
            f"volume is {v.shape[2]}x{v.shape[1]} but spec says {spec.width}x{spec.height}"
        )
    if spec.frames is not None and spec.frames != frames:
        raise ValueError(f"volume has {frames} frames but spec says {spec.frames}")
    luma = quantize(v).reshape(frames, spec.luma_bytes)

    if spec.pixel_format == "y8":
        luma.tofile(spec.path)
        return

    chroma_bytes = spec.frame_bytes - spec.luma_bytes
    if chroma_from is not None:
        src = RawVideoSpec(
            path=chroma_from,
            width=spec.width,
            height=spec.height,
            frames=frames,
            pixel_format="yuv420p",
        )
        n = _frame_count(src, os.path.getsize(chroma_from))
        raw = np.fromfile(chroma_from, dtype=np.uint8, count=n * src.frame_bytes)
        chroma = raw.reshape(n, src.frame_bytes)[:, spec.luma_bytes :]
    else:
        chroma = np.full((frames, chroma_bytes), 128, dtype=np.uint8)
    out = np.concatenate([luma, chroma], axis=1)
    out.tofile(spec.path)


def read_mask(path: str, width: int, height: int, frames: Optional[int] = None) -> np.ndarray:
    """Load a raw tri-state mask; any byte other than 0/128/255 is rejected
    with its file offset."""
    spec = RawVideoSpec(path=path, width=width, height=height, frames=frames)
    size = os.path.getsize(path)
    n = _frame_count(spec, size)
    raw = np.fromfile(path, dtype=np.uint8, count=n * spec.frame_bytes)
    try:
        return check_mask(raw.reshape(n, height, width))
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


def write_mask(mask, path: str) -> None:
    m = check_mask(mask)
    m.astype(np.uint8).tofile(path)


def _write_pgm(image: np.ndarray, path: str) -> None:
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(image.astype(np.uint8).tobytes())


def write_order_map(order_map: np.ndarray, directory: str, prefix: str = "order") -> List[str]:
    """Write per-frame order-map images as binary PGM (P5).

    Batch timestamps are scaled linearly to [0, 254]; samples outside any
    processed hole cube get the reserved value 255.  Returns the written
    paths in frame order.
    """
    om = np.asarray(order_map)
    if om.ndim != 3:
        raise ValueError(f"order map must be 3-dimensional, got shape {om.shape}")
    os.makedirs(directory, exist_ok=True)
    t_max = int(om.max())
    holes = om >= 0
    scaled = np.full(om.shape, ORDER_MAP_RESERVED, dtype=np.uint8)
    if t_max > 0:
        scaled[holes] = np.floor(om[holes] * 254.0 / t_max + 0.5).astype(np.uint8)
    else:
        scaled[holes] = 0
    paths = []
    for f in range(om.shape[0]):
        path = os.path.join(directory, f"{prefix}_{f:04d}.pgm")
        _write_pgm(scaled[f], path)
        paths.append(path)
    return paths
