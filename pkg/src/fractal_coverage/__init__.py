"""Coverage-boundary reconstruction from drive tests and fractal (Hurst) analysis."""

__version__ = "0.1.0"

from .boundary import BoundarySeries  # noqa: E402
from .geo_ingest import (  # noqa: E402
    DriveTestSample,
    PolarProjector,
    PolarSample,
    StationConfig,
    parse_drive_test,
    smooth_power,
    to_polar,
)
from .hurst import (  # noqa: E402
    HurstEstimate,
    HurstTransformer,
    PeriodogramHurst,
    RescaledRangeHurst,
    VarianceTimeHurst,
    estimate_all,
    periodogram_hurst,
    rs_hurst,
    variance_time_hurst,
)
from .pathloss import (  # noqa: E402
    SectorPathLoss,
    boundary_distance,
    build_derived_boundary,
    build_measured_boundary,
    fit_sector,
    partition_sectors,
)
from .synth import FractalBoundaryConfig, fgn, fractal_boundary  # noqa: E402

__all__ = [
    "BoundarySeries",
    "DriveTestSample",
    "FractalBoundaryConfig",
    "HurstEstimate",
    "HurstTransformer",
    "PeriodogramHurst",
    "PolarProjector",
    "PolarSample",
    "RescaledRangeHurst",
    "SectorPathLoss",
    "StationConfig",
    "VarianceTimeHurst",
    "boundary_distance",
    "build_derived_boundary",
    "build_measured_boundary",
    "estimate_all",
    "fgn",
    "fit_sector",
    "fractal_boundary",
    "parse_drive_test",
    "partition_sectors",
    "periodogram_hurst",
    "rs_hurst",
    "smooth_power",
    "to_polar",
    "variance_time_hurst",
]
