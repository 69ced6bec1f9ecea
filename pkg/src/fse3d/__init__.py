"""3D hole filling in video volumes by frequency selective extrapolation."""

from .core import (
    CLS_EXCLUDED,
    CLS_KNOWN,
    CLS_RECON,
    CLS_TARGET,
    KNOWN,
    RECONSTRUCTED,
    UNKNOWN,
    CubeGrid,
    ExtrapolationWindow,
    FseParams,
    check_mask,
    check_volume,
    check_volume_mask,
    commit_cube,
    extract_window,
    partition,
)
from .estimator import FrequencySelectiveInpainter
from .fse import (
    NoSupportError,
    SpectralState,
    WeightField,
    build_weights,
    fill_cube,
    model_fd,
    model_sd,
)
from .metrics import QualityReport, psnr_over_holes, quality_report, ssim_per_frame
from .patterns import gen_diagonal_bars, gen_lenses, gen_linear_bars, hole_ratio
from .scheduler import (
    FillReport,
    FillResult,
    OrderState,
    complete_batch,
    export_order_map,
    init_counts,
    next_batch,
    run_fill,
)
from .video_io import (
    RawVideoSpec,
    read_mask,
    read_volume,
    write_mask,
    write_order_map,
    write_volume,
)

__version__ = "0.1.0"

__all__ = [
    "CLS_EXCLUDED",
    "CLS_KNOWN",
    "CLS_RECON",
    "CLS_TARGET",
    "KNOWN",
    "RECONSTRUCTED",
    "UNKNOWN",
    "CubeGrid",
    "ExtrapolationWindow",
    "FillReport",
    "FillResult",
    "FrequencySelectiveInpainter",
    "FseParams",
    "NoSupportError",
    "OrderState",
    "QualityReport",
    "RawVideoSpec",
    "SpectralState",
    "WeightField",
    "build_weights",
    "check_mask",
    "check_volume",
    "check_volume_mask",
    "commit_cube",
    "complete_batch",
    "export_order_map",
    "extract_window",
    "fill_cube",
    "gen_diagonal_bars",
    "gen_lenses",
    "gen_linear_bars",
    "hole_ratio",
    "init_counts",
    "model_fd",
    "model_sd",
    "next_batch",
    "partition",
    "psnr_over_holes",
    "quality_report",
    "read_mask",
    "read_volume",
    "run_fill",
    "ssim_per_frame",
    "write_mask",
    "write_order_map",
    "write_volume",
    "__version__",
]
