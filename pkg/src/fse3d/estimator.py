"""scikit-learn compatible front end for the volume hole filler.

The transformer treats a 3D array ``(frames, height, width)`` as one video
volume.  Holes are marked imputer-style by NaN samples, or by an explicit
tri-state mask passed to :meth:`transform`.  The filler itself is stateless;
``fit`` only validates input, so the estimator composes with pipelines,
``clone`` and ``get_params``/``set_params``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .core import KNOWN, UNKNOWN, FseParams, check_mask, check_volume
from .scheduler import run_fill


class FrequencySelectiveInpainter(BaseEstimator, TransformerMixin):
    """Fill 3D holes in video volumes by frequency selective extrapolation.

    Parameters
    ----------
    cube_edge : int, default 4
        Edge length of the reconstruction cubes.
    border : int, default 14
        Support border around each cube; the model window spans
        ``cube_edge + 2 * border`` samples per axis.
    decay : float, default 0.7
        Base of the exponential distance decay of support weights.
    recon_weight : float, default 0.5
        Weight discount for samples filled in earlier steps.
    compensation : float, default 0.5
        Shrinkage of each selected coefficient, compensating the
        non-orthogonal weighted basis.
    max_iterations : int, default 100
        Basis selections per cube.
    order : {"opt", "ls"}, default "opt"
        Cube processing order: optimized outer-margin-inwards batches, or
        plain line scan.
    workers : int or None, default None
        Thread count for in-batch parallelism (None: one per CPU).  The
        result is identical for any value.
    fallback_value : float, default 128.0
        Value written into cubes whose window has no support at all.

    Attributes
    ----------
    report_ : FillReport
        Summary of the last :meth:`transform` run.
    """

    def __init__(
        self,
        cube_edge: int = 4,
        border: int = 14,
        decay: float = 0.7,
        recon_weight: float = 0.5,
        compensation: float = 0.5,
        max_iterations: int = 100,
        order: str = "opt",
        workers: Optional[int] = None,
        fallback_value: float = 128.0,
    ) -> None:
        self.cube_edge = cube_edge
        self.border = border
        self.decay = decay
        self.recon_weight = recon_weight
        self.compensation = compensation
        self.max_iterations = max_iterations
        self.order = order
        self.workers = workers
        self.fallback_value = fallback_value

    def _fse_params(self) -> FseParams:
        return FseParams(
            cube_edge=self.cube_edge,
            border=self.border,
            decay=self.decay,
            recon_weight=self.recon_weight,
            compensation=self.compensation,
            max_iterations=self.max_iterations,
            fallback_value=self.fallback_value,
        )

    def fit(self, X, y=None):
        """Validate parameters and input shape; the filler learns nothing."""
        self._fse_params()
        X = check_volume(X, allow_nan=True)
        self.n_features_in_ = X.size
        self.volume_shape_ = X.shape
        return self

    def transform(self, X, mask=None) -> np.ndarray:
        """Return a filled copy of the volume ``X``.

        Without an explicit mask, NaN samples mark the holes.  With a
        tri-state mask, samples may be NaN only where the mask says
        unknown.
        """
        X = check_volume(X, allow_nan=True)
        nan = np.isnan(X)
        if mask is None:
            m = np.full(X.shape, KNOWN, dtype=np.uint8)
            m[nan] = UNKNOWN
        else:
            m = check_mask(mask, shape=X.shape)
            if (nan & (m != UNKNOWN)).any():
                raise ValueError("NaN sample at a position the mask declares known")
        volume = np.where(nan, 0.0, X)
        result = run_fill(
            volume,
            m,
            params=self._fse_params(),
            order=self.order,
            workers=self.workers,
        )
        self.report_ = result.report
        return result.volume
