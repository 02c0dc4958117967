"""Distribution diagnostics of boundary series and gridded power fields for plotting."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats as sps

from .exceptions import InputError
from .pathloss import predict_power
from .utils import check_nonconstant, check_positive_int, check_series


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    densities: np.ndarray
    n: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def integral(self) -> float:
        return float(np.sum(self.densities * self.widths))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n = {self.n}\n")
        buf.write("bin_left,bin_right,density\n")
        for lo, hi, dens in zip(self.bin_edges[:-1], self.bin_edges[1:], self.densities):
            buf.write(f"{float(lo)!r},{float(hi)!r},{float(dens)!r}\n")
        return buf.getvalue()


def default_bins(n: int) -> int:
    return max(2, math.ceil(math.sqrt(n)))


def empirical_pdf(series, n_bins: int | None = None) -> Histogram:
    """Equal-width density histogram over ``[min, max]``; the last bin is closed.

    ``n_bins`` defaults to ``ceil(sqrt(N))``. A constant series has no width
    to spread over and raises :class:`DegenerateSeriesError`.
    """
    x = check_series(series, min_length=1)
    n_bins = default_bins(x.size) if n_bins is None else check_positive_int(n_bins, "n_bins", minimum=2)
    lo, hi = float(x.min()), float(x.max())
    check_nonconstant(x, rtol=0.0 if x.size < 2 else 1e-10)
    counts, edges = np.histogram(x, bins=n_bins, range=(lo, hi))
    dens = counts / (x.size * np.diff(edges))
    return Histogram(bin_edges=edges, densities=dens, n=int(x.size))


class TailReport(NamedTuple):
    excess_kurtosis: float
    skewness: float
    max_over_median: float


def tail_report(series) -> TailReport:
    """Moment skewness and excess kurtosis, and max/median as a burstiness ratio."""
    x = check_series(series, min_length=8)
    check_nonconstant(x)
    med = float(np.median(x))
    ratio = float(x.max() / med) if med != 0 else float("inf")
    return TailReport(
        excess_kurtosis=float(sps.kurtosis(x, fisher=True, bias=True)),
        skewness=float(sps.skew(x, bias=True)),
        max_over_median=ratio,
    )


@dataclass(frozen=True)
class PowerField:
    x: np.ndarray
    y: np.ndarray
    dbm: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x_m,y_m,dbm\n")
        for a, b, c in zip(self.x.ravel(), self.y.ravel(), self.dbm.ravel()):
            buf.write(f"{float(a)!r},{float(b)!r},{float(c)!r}\n")
        return buf.getvalue()


def power_field(fits, extent, resolution: float) -> PowerField:
    """Evaluate the per-sector model on a regular grid centered on the station.

    ``extent`` is ``(xmin, xmax, ymin, ymax)`` in meters east/north of the
    station; cell centers are spaced ``resolution`` meters apart starting at
    ``xmin``/``ymin``. The cell at the station takes its sector's ``p_ref``.
    """
    if not resolution > 0:
        raise InputError(f"resolution must be positive, got {resolution}")
    if not fits:
        raise InputError("no sector fits given")
    xmin, xmax, ymin, ymax = map(float, extent)
    if xmax < xmin or ymax < ymin:
        raise InputError("extent must satisfy xmin <= xmax and ymin <= ymax")
    nx = int(math.floor((xmax - xmin) / resolution + 1e-9)) + 1
    ny = int(math.floor((ymax - ymin) / resolution + 1e-9)) + 1
    xs = xmin + resolution * np.arange(nx)
    ys = ymin + resolution * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    angle = np.mod(np.degrees(np.arctan2(gy, gx)), 360.0)
    dist = np.hypot(gx, gy)
    return PowerField(x=gx, y=gy, dbm=predict_power(fits, angle, dist))
