"""Cube processing order and batch execution.

Two orders are provided.  Line scan ("ls") walks the hole cubes x-fastest,
then y, then t, committing after every cube.  The optimized order ("opt")
repeatedly processes the set of cubes with the fewest not-yet-extrapolated
neighbors, excluding direct neighbors from the same batch, which closes
holes from the outer margin inwards and lets all cubes of a batch run in
parallel against the batch-start snapshot.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage

from .core import (
    UNKNOWN,
    CubeGrid,
    FseParams,
    check_volume_mask,
    commit_cube,
    partition,
)
from .fse import fill_cube

# Compensation added to the neighbor count of cubes at the volume boundary,
# by the number of grid axes on which the cube touches the boundary.
_BOUNDARY_BONUS = (0, 9, 15, 19)

GridIndex = Tuple[int, int, int]


@dataclass
class OrderState:
    """Mutable bookkeeping of one fill run over a cube grid.

    ``counts`` holds the number of not-yet-extrapolated neighboring cubes,
    boundary-compensated; -1 marks cubes that are finished or never had
    unknown samples.  ``timestamps`` records the batch number in which each
    cube was processed (-1 where not applicable).
    """

    grid: CubeGrid
    counts: np.ndarray      # int32, grid shape
    timestamps: np.ndarray  # int32, grid shape
    batches: List[List[GridIndex]] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return bool((self.counts < 0).all())


def _neighborhood(index: GridIndex, shape: Tuple[int, int, int]) -> Tuple[slice, ...]:
    return tuple(slice(max(0, i - 1), min(g, i + 2)) for i, g in zip(index, shape))


def init_counts(grid: CubeGrid) -> OrderState:
    """Initialize neighbor counts for a freshly partitioned grid.

    Every cube with unknown samples increments all 26-neighbors; boundary
    cubes receive the compensation bonus; cubes without unknown samples are
    then pinned at -1.
    """
    hole = grid.has_unknown.astype(np.int32)
    kernel = np.ones((3, 3, 3), dtype=np.int32)
    counts = ndimage.convolve(hole, kernel, mode="constant", cval=0) - hole

    boundary_axes = np.zeros(grid.shape, dtype=np.int32)
    for axis, g in enumerate(grid.shape):
        onb = np.zeros(grid.shape, dtype=bool)
        first = [slice(None)] * 3
        first[axis] = slice(0, 1)
        last = [slice(None)] * 3
        last[axis] = slice(g - 1, g)
        onb[tuple(first)] = True
        onb[tuple(last)] = True
        boundary_axes += onb
    counts += np.asarray(_BOUNDARY_BONUS, dtype=np.int32)[boundary_axes]

    counts[~grid.has_unknown] = -1
    return OrderState(
        grid=grid,
        counts=counts,
        timestamps=np.full(grid.shape, -1, dtype=np.int32),
    )


def next_batch(state: OrderState) -> List[GridIndex]:
    """Select the next batch: unprocessed cubes at the minimum neighbor
    count, scanned x-fastest, skipping cubes adjacent to an earlier pick.

    Returns an empty list when nothing is left to process.
    """
    counts = state.counts
    active = counts >= 0
    if not active.any():
        return []
    n_min = int(counts[active].min())
    batch: List[GridIndex] = []
    picked = np.zeros(state.grid.shape, dtype=bool)
    for idx in zip(*np.nonzero(counts == n_min)):
        index = (int(idx[0]), int(idx[1]), int(idx[2]))
        if picked[_neighborhood(index, state.grid.shape)].any():
            continue
        batch.append(index)
        picked[index] = True
    return batch


def complete_batch(state: OrderState, batch: List[GridIndex]) -> None:
    """Mark a processed batch: pin members at -1, decrement their
    unfinished neighbors, record timestamps."""
    batch_no = len(state.batches)
    for index in batch:
        state.counts[index] = -1
        state.timestamps[index] = batch_no
    for index in batch:
        box = state.counts[_neighborhood(index, state.grid.shape)]
        box[box >= 0] -= 1
    state.batches.append(list(batch))


@dataclass
class FillReport:
    """Deterministic summary of one fill run (no timings, no thread counts,
    so reports compare equal across parallelism degrees)."""

    order: str
    volume_shape: Tuple[int, int, int]
    cube_edge: int
    border: int
    decay: float
    recon_weight: float
    compensation: float
    max_iterations: int
    hole_samples: int
    hole_cubes: int
    n_batches: int
    batch_sizes: List[int]
    no_support_cubes: List[GridIndex]

    def to_dict(self) -> Dict[str, Any]:
        d = dict(self.__dict__)
        d["volume_shape"] = list(self.volume_shape)
        d["no_support_cubes"] = [list(i) for i in self.no_support_cubes]
        return d


@dataclass
class FillResult:
    volume: np.ndarray
    mask: np.ndarray
    report: FillReport
    state: OrderState


def run_fill(
    volume,
    mask,
    params: Optional[FseParams] = None,
    order: str = "opt",
    workers: Optional[int] = None,
) -> FillResult:
    """Fill every hole cube of a volume and return the result bundle.

    The inputs are left untouched; the returned volume and mask are filled
    copies.  ``workers`` bounds the thread pool used within each optimized
    batch (None: one per CPU); results are identical for any degree because
    every cube of a batch reads only the batch-start snapshot and commits
    are applied afterwards in scan order.
    """
    if order not in ("opt", "ls"):
        raise ValueError(f"order must be 'opt' or 'ls', got {order!r}")
    params = params or FseParams()
    v, m = check_volume_mask(volume, mask)
    v = v.copy()
    m = m.copy()
    grid = partition(v, m, params.cube_edge)
    state = init_counts(grid)
    hole_samples = int(np.count_nonzero(m == UNKNOWN))
    hole_cubes = int(np.count_nonzero(grid.has_unknown))
    no_support: List[GridIndex] = []

    if order == "ls":
        for idx in grid.scan_indices():
            if not grid.has_unknown[idx]:
                continue
            values, fallback = fill_cube(v, m, grid, idx, params)
            commit_cube(v, m, grid, idx, values)
            if fallback:
                no_support.append(idx)
            complete_batch(state, [idx])
    else:
        n_workers = workers if workers is not None else (os.cpu_count() or 1)
        pool = ThreadPoolExecutor(max_workers=n_workers) if n_workers > 1 else None
        try:
            while True:
                batch = next_batch(state)
                if not batch:
                    break
                task = lambda idx: fill_cube(v, m, grid, idx, params)
                if pool is None:
                    results = [task(idx) for idx in batch]
                else:
                    results = list(pool.map(task, batch))
                for idx, (values, fallback) in zip(batch, results):
                    commit_cube(v, m, grid, idx, values)
                    if fallback:
                        no_support.append(idx)
                complete_batch(state, batch)
        finally:
            if pool is not None:
                pool.shutdown()

    report = FillReport(
        order=order,
        volume_shape=v.shape,
        cube_edge=params.cube_edge,
        border=params.border,
        decay=params.decay,
        recon_weight=params.recon_weight,
        compensation=params.compensation,
        max_iterations=params.max_iterations,
        hole_samples=hole_samples,
        hole_cubes=hole_cubes,
        n_batches=len(state.batches),
        batch_sizes=[len(b) for b in state.batches],
        no_support_cubes=no_support,
    )
    return FillResult(volume=v, mask=m, report=report, state=state)


def export_order_map(state: OrderState) -> np.ndarray:
    """Per-sample batch timestamps as an int32 volume ``(t, y, x)``.

    Samples of processed hole cubes carry the batch number in which their
    cube was filled; everything else carries -1.  Rejects incomplete runs.
    """
    if not state.complete:
        raise ValueError("order map requested before the run completed")
    image = np.full(state.grid.volume_shape, -1, dtype=np.int32)
    for idx in zip(*np.nonzero(state.timestamps >= 0)):
        image[state.grid.cube_slices(idx)] = state.timestamps[idx]
    return image
