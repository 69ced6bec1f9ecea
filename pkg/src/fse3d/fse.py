"""Iterative sparse model generation for one extrapolation window.

Each window is approximated as a complex-valued superposition of 3D Fourier
basis functions, selected greedily one per iteration.  Two implementations
of the same iteration are provided: ``model_fd`` runs entirely on DFT
spectra (the production path), ``model_sd`` evaluates the weighted
projections against explicit basis arrays and serves as a slow reference
for validating the spectral path on small windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import fft as spfft

from .core import (
    CLS_KNOWN,
    CLS_RECON,
    CLS_TARGET,
    CubeGrid,
    ExtrapolationWindow,
    FseParams,
    extract_window,
)

# model_sd materializes the full basis matrix (size^2 complex entries); keep
# it for validation-scale windows only.
_SD_MAX_SAMPLES = 1728  # 12^3

# Relative band below the selection-metric maximum treated as a tie.  Real
# inputs make conjugate frequency pairs tie exactly in exact arithmetic;
# without the band, rounding noise would pick sides inconsistently between
# the spectral and the spatial path.
_TIE_REL_TOL = 1e-12


def _argmax_lex(metric: np.ndarray) -> int:
    """Flat index of the metric maximum; ties go to the smallest index.

    All indices within a tiny relative band of the maximum count as tied,
    and C order over the window axes makes "smallest flat" mean the
    lexicographically smallest frequency triple.
    """
    top = float(metric.max())
    return int(np.argmax(metric >= top * (1.0 - _TIE_REL_TOL)))


class NoSupportError(ValueError):
    """Window holds no known or previously reconstructed samples."""


@dataclass
class WeightField:
    """Per-sample weights with their cached spectrum.

    ``dc`` is the zero-frequency spectral value, i.e. the total weight; it
    normalizes every projection coefficient.
    """

    values: np.ndarray    # float64, window shape
    spectrum: np.ndarray  # complex128, window shape
    dc: float


@dataclass
class ResidualTrace:
    """Per-iteration residual diagnostics (debug mode).

    Entry 0 describes the state before the first selection; entry ``v`` the
    state after iteration ``v``.  ``closure_max_err`` compares the running
    residual spectrum against a from-scratch transform of the spatial
    weighted residual.
    """

    weighted_energy: List[float] = field(default_factory=list)   # sum w |r|^2
    spatial_sq_sum: List[float] = field(default_factory=list)    # sum |r w|^2
    spectral_sq_sum: List[float] = field(default_factory=list)   # sum |R|^2 / size
    closure_max_err: List[float] = field(default_factory=list)


@dataclass
class SpectralState:
    """Final state of the frequency-domain iteration."""

    iterations: int
    model_spectrum: np.ndarray     # complex128
    residual_spectrum: np.ndarray  # complex128
    selections: List[Tuple[Tuple[int, int, int], complex]]
    trace: Optional[ResidualTrace] = None


@lru_cache(maxsize=8)
def _decay_field(shape: Tuple[int, int, int], decay: float) -> np.ndarray:
    """Exponential decay of the window-center distance, per sample."""
    sq = [
        (np.arange(n, dtype=np.float64) - (n - 1) / 2.0) ** 2
        for n in shape
    ]
    dist = np.sqrt(
        sq[0][:, None, None] + sq[1][None, :, None] + sq[2][None, None, :]
    )
    return decay ** dist


def build_weights(window: ExtrapolationWindow, params: FseParams) -> WeightField:
    """Compute sample weights and their DFT for one classified window.

    Known samples weigh ``decay**distance``, previously reconstructed ones
    the same discounted by ``recon_weight``, everything else zero.
    """
    rho = _decay_field(window.signal.shape, params.decay)
    w = np.zeros_like(rho)
    known = window.classes == CLS_KNOWN
    recon = window.classes == CLS_RECON
    w[known] = rho[known]
    w[recon] = params.recon_weight * rho[recon]
    if not w.any():
        raise NoSupportError(f"cube {window.cube_index}: window has no support samples")
    spectrum = spfft.fftn(w)
    return WeightField(values=w, spectrum=spectrum, dc=float(spectrum[0, 0, 0].real))


def model_fd(
    window: ExtrapolationWindow,
    weights: WeightField,
    params: FseParams,
    track_residuals: bool = False,
) -> Tuple[np.ndarray, SpectralState]:
    """Generate the window model in the frequency domain.

    Runs exactly ``params.max_iterations`` selections.  Per iteration the
    strongest bin of the weighted-residual spectrum is picked (ties go to
    the lexicographically smallest frequency triple), its compensated
    coefficient is added to the model spectrum, and the residual spectrum
    is updated by subtracting the correspondingly shifted weight spectrum.

    Returns the complex model over the window together with the final
    spectral state; the reconstruction consumes its real part.
    """
    s = window.signal
    if not np.isfinite(s).all():
        raise ValueError("window signal contains non-finite samples")
    if weights.dc <= 0.0:
        raise NoSupportError("weight spectrum has no DC mass")

    shape = s.shape
    size = s.size
    gamma = params.compensation
    dc = weights.dc

    residual = spfft.fftn(s * weights.values)
    model = np.zeros(shape, dtype=np.complex128)
    # Doubled copy of the weight spectrum: a plain slice of it realizes the
    # cyclically shifted spectrum without per-iteration rolls.
    tiled = np.tile(weights.spectrum, (2, 2, 2))
    power = np.empty(shape, dtype=np.float64)
    selections: List[Tuple[Tuple[int, int, int], complex]] = []
    trace = ResidualTrace() if track_residuals else None
    if trace is not None:
        _record_trace(trace, s, weights, model, residual)

    nx, ny, nt = shape
    for _ in range(params.max_iterations):
        np.multiply(residual.real, residual.real, out=power)
        power += residual.imag * residual.imag
        flat = _argmax_lex(power)
        u, v, z = np.unravel_index(flat, shape)
        coeff = gamma * residual[u, v, z] / dc
        model[u, v, z] += size * coeff
        shifted = tiled[nx - u : 2 * nx - u, ny - v : 2 * ny - v, nt - z : 2 * nt - z]
        residual -= coeff * shifted
        selections.append(((int(u), int(v), int(z)), complex(coeff)))
        if trace is not None:
            _record_trace(trace, s, weights, model, residual)

    state = SpectralState(
        iterations=params.max_iterations,
        model_spectrum=model,
        residual_spectrum=residual,
        selections=selections,
        trace=trace,
    )
    return spfft.ifftn(model), state


def _record_trace(
    trace: ResidualTrace,
    signal: np.ndarray,
    weights: WeightField,
    model_spectrum: np.ndarray,
    residual_spectrum: np.ndarray,
) -> None:
    g = spfft.ifftn(model_spectrum)
    r = signal - g
    rw = r * weights.values
    size = signal.size
    trace.weighted_energy.append(float(np.sum(weights.values * np.abs(r) ** 2)))
    trace.spatial_sq_sum.append(float(np.sum(np.abs(rw) ** 2)))
    trace.spectral_sq_sum.append(float(np.sum(np.abs(residual_spectrum) ** 2) / size))
    trace.closure_max_err.append(
        float(np.max(np.abs(spfft.fftn(rw) - residual_spectrum)))
    )


@lru_cache(maxsize=2)
def _basis_matrix(shape: Tuple[int, int, int]) -> np.ndarray:
    """All 3D Fourier basis functions as a (frequency, sample) matrix.

    Row order enumerates frequency triples (k, l, q) lexicographically,
    column order the samples (m, n, p) in C order, matching the window
    array layout.
    """
    axes = [
        np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
        for n in shape
    ]
    basis = np.einsum("km,ln,qp->klqmnp", axes[0], axes[1], axes[2])
    size = int(np.prod(shape))
    return basis.reshape(size, size)


def model_sd(
    window: ExtrapolationWindow,
    weights: WeightField,
    params: FseParams,
) -> Tuple[np.ndarray, List[Tuple[Tuple[int, int, int], complex]]]:
    """Generate the window model with explicit spatial-domain projections.

    Literal evaluation of the weighted matching pursuit: per iteration the
    residual is projected onto every basis function, the selection metric
    weighs each squared projection by the weighted basis energy, and model
    and residual are updated sample-wise.  Validation oracle for small
    windows; quadratic in the window size.
    """
    s = window.signal
    if not np.isfinite(s).all():
        raise ValueError("window signal contains non-finite samples")
    if s.size > _SD_MAX_SAMPLES:
        raise ValueError(
            f"spatial-domain reference limited to {_SD_MAX_SAMPLES} samples, "
            f"got window of {s.size}"
        )
    if weights.dc <= 0.0:
        raise NoSupportError("weight spectrum has no DC mass")

    shape = s.shape
    basis = _basis_matrix(shape)
    conj = basis.conj()
    wflat = weights.values.ravel()
    # Weighted energy of every basis function (identical across rows for the
    # Fourier basis, evaluated literally anyway).
    energy = (np.abs(basis) ** 2) @ wflat

    gamma = params.compensation
    residual = s.astype(np.complex128).ravel()
    model = np.zeros_like(residual)
    selections: List[Tuple[Tuple[int, int, int], complex]] = []
    for _ in range(params.max_iterations):
        proj = (conj @ (residual * wflat)) / energy
        metric = np.abs(proj) ** 2 * energy
        flat = _argmax_lex(metric)
        coeff = gamma * proj[flat]
        phi = basis[flat]
        model += coeff * phi
        residual -= coeff * phi
        idx = tuple(int(i) for i in np.unravel_index(flat, shape))
        selections.append((idx, complex(coeff)))
    return model.reshape(shape), selections


def fill_cube(
    volume: np.ndarray,
    mask: np.ndarray,
    grid: CubeGrid,
    cube_index,
    params: FseParams,
) -> Tuple[np.ndarray, bool]:
    """Model one cube's window and return fill values for its unknown samples.

    Values come back unclamped, in C order over the cube box in volume
    coordinates, ready for ``core.commit_cube``.  When the window has no
    support at all the neutral fallback value is returned and flagged.
    """
    window = extract_window(volume, mask, grid, cube_index, params)
    try:
        weights = build_weights(window, params)
    except NoSupportError:
        return np.full(window.n_targets, params.fallback_value), True
    model, _ = model_fd(window, weights, params)
    box = model[window.cube_window].real.transpose(2, 1, 0)  # to (t, y, x)
    classes_box = window.classes[window.cube_window].transpose(2, 1, 0)
    return box[classes_box == CLS_TARGET], False
