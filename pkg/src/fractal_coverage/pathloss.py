"""Sectorized log-distance path-loss fitting and boundary inversion.

Model per sector ``k``::

    P(d) = p_ref - 10 * gamma_k * log10(d / d0) - psi_k

``gamma_k`` and ``psi_k`` are the slope and intercept of the least-squares
line through ``(10*log10(d/d0), p_ref - P)``. A positive ``psi`` is extra
attenuation.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .boundary import GENERATOR_NAME, BoundarySeries, make_rng
from .exceptions import (
    BoundaryInsideReferenceWarning,
    DegenerateSeriesError,
    ExtrapolationWarning,
    InputError,
    UnfittableSectorError,
)
from .geo_ingest import PolarSample
from .utils import check_positive_int

DEFAULT_N_SECTORS = 120
DEFAULT_P_MIN = -110.0
EXTRAPOLATION_FACTOR = 10.0


@dataclass(frozen=True)
class SectorFit:
    sector_index: int
    gamma: float
    psi: float
    d0: float
    p_ref: float
    n_samples: int
    r_squared: float
    max_distance: float = float("nan")

    def predict(self, distance):
        """Model power in dBm at ``distance`` meters."""
        d = np.asarray(distance, dtype=float)
        return self.p_ref - 10.0 * self.gamma * np.log10(d / self.d0) - self.psi


@dataclass
class SectorPartition:
    """Samples binned by ``k = floor(angle / sector_width)``; per-bin order is input order."""

    n_sectors: int
    bins: list

    @property
    def sector_width(self) -> float:
        return 360.0 / self.n_sectors

    def counts(self) -> np.ndarray:
        return np.array([len(b) for b in self.bins], dtype=int)


def sector_indices(angles, n_sectors: int) -> np.ndarray:
    width = 360.0 / n_sectors
    k = np.floor(np.asarray(angles, dtype=float) / width).astype(int)
    # angles just below 360 can round into bin n_sectors
    return np.clip(k, 0, n_sectors - 1)


def partition_sectors(samples, n_sectors: int = DEFAULT_N_SECTORS) -> SectorPartition:
    n_sectors = check_positive_int(n_sectors, "n_sectors")
    if not samples:
        raise InputError("no samples to partition")
    bins = [[] for _ in range(n_sectors)]
    for s, k in zip(samples, sector_indices([s.angle for s in samples], n_sectors)):
        bins[k].append(s)
    return SectorPartition(n_sectors=n_sectors, bins=bins)


def _resolve_reference(distances, powers, reference):
    """Return ``(d0, p_ref)`` for a bin under a reference rule.

    ``reference`` is ``"nearest"`` (closest sample to the station),
    ``"farthest"``, an integer position within the bin, or an explicit
    ``(d0, p_ref)`` pair.
    """
    if isinstance(reference, str):
        if reference == "nearest":
            i = int(np.argmin(distances))
        elif reference == "farthest":
            i = int(np.argmax(distances))
        else:
            raise InputError(f"unknown reference rule {reference!r}")
        return float(distances[i]), float(powers[i])
    if isinstance(reference, (int, np.integer)):
        return float(distances[reference]), float(powers[reference])
    try:
        d0, p_ref = reference
    except (TypeError, ValueError):
        raise InputError(f"unknown reference rule {reference!r}") from None
    if not d0 > 0:
        raise InputError(f"reference distance must be positive, got {d0}")
    return float(d0), float(p_ref)


def fit_sector(samples, reference="nearest", sector_index: int = 0) -> SectorFit:
    """Least-squares fit of ``gamma`` and ``psi`` to one sector's samples.

    Raises :class:`UnfittableSectorError` when the bin has fewer than two
    distinct distances.
    """
    d = np.array([s.distance for s in samples], dtype=float)
    p = np.array([s.rssi for s in samples], dtype=float)
    if d.size < 2 or np.unique(d).size < 2:
        raise UnfittableSectorError([sector_index], f"{np.unique(d).size} distinct distances")
    if np.any(d <= 0):
        raise InputError(f"sector {sector_index}: distances must be positive")
    d0, p_ref = _resolve_reference(d, p, reference)

    x = 10.0 * np.log10(d / d0)
    y = p_ref - p
    xm, ym = x.mean(), y.mean()
    sxx = np.dot(x - xm, x - xm)
    gamma = float(np.dot(x - xm, y - ym) / sxx)
    psi = float(ym - gamma * xm)
    resid = y - (gamma * x + psi)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - ym, y - ym))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SectorFit(
        sector_index=int(sector_index),
        gamma=gamma,
        psi=psi,
        d0=d0,
        p_ref=p_ref,
        n_samples=int(d.size),
        r_squared=min(max(r2, 0.0), 1.0),
        max_distance=float(d.max()),
    )


def invert_path_loss(gamma, psi, d0, p_ref, p_min):
    """Distance where the model reaches ``p_min``; vectorized over the inputs."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0):
        raise DegenerateSeriesError("path-loss exponent must be positive; the boundary is undefined")
    margin = np.asarray(p_ref, dtype=float) - np.asarray(psi, dtype=float) - p_min
    if np.any(margin <= 0):
        warnings.warn(
            "power threshold is not below the reference power; the boundary lies "
            "inside the reference distance",
            BoundaryInsideReferenceWarning,
            stacklevel=2,
        )
    return np.asarray(d0, dtype=float) * 10.0 ** (margin / (10.0 * gamma))


def boundary_distance(fit: SectorFit, p_min: float = DEFAULT_P_MIN) -> float:
    """``d0 * 10**((p_ref - p_min - psi) / (10 * gamma))``."""
    return float(invert_path_loss(fit.gamma, fit.psi, fit.d0, fit.p_ref, p_min))


def fit_all_sectors(partition: SectorPartition, reference="nearest", n_jobs: int | None = None):
    """Fit every sector; results are in sector order regardless of ``n_jobs``."""
    def job(k):
        try:
            return fit_sector(partition.bins[k], reference, sector_index=k)
        except UnfittableSectorError as exc:
            return exc

    ks = range(partition.n_sectors)
    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(job, ks))
    else:
        results = [job(k) for k in ks]
    bad = [k for k, r in zip(ks, results) if isinstance(r, Exception)]
    if bad:
        raise UnfittableSectorError(bad, "fewer than 2 samples at distinct distances")
    return results


def build_measured_boundary(partition: SectorPartition, p_min: float = DEFAULT_P_MIN,
                            reference="nearest", n_jobs: int | None = None) -> BoundarySeries:
    """Boundary from per-sector fits.

    No sector is interpolated: any unfittable sector raises
    :class:`UnfittableSectorError` listing all of them. Sectors whose
    boundary lies more than ten times beyond their farthest sample are
    listed in ``metadata["extrapolated_sectors"]`` and warned about.
    """
    fits = fit_all_sectors(partition, reference, n_jobs)
    flat = [f.sector_index for f in fits if not f.gamma > 0]
    if flat:
        raise DegenerateSeriesError(f"no power decay (gamma <= 0) in sectors {flat}; boundary undefined")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryInsideReferenceWarning)
        phi = invert_path_loss(
            [f.gamma for f in fits], [f.psi for f in fits],
            [f.d0 for f in fits], [f.p_ref for f in fits], p_min,
        )
    inside = [f.sector_index for f in fits if f.p_ref - f.psi - p_min <= 0]
    if inside:
        warnings.warn(f"boundary inside the reference distance in sectors {inside}",
                      BoundaryInsideReferenceWarning, stacklevel=2)
    far = [f.sector_index for f, d in zip(fits, phi) if d > EXTRAPOLATION_FACTOR * f.max_distance]
    if far:
        warnings.warn(f"boundary extrapolated beyond 10x the farthest sample in sectors {far}",
                      ExtrapolationWarning, stacklevel=2)
    meta = {
        "reference_rule": reference if isinstance(reference, str) else repr(reference),
        "gamma": [f.gamma for f in fits],
        "psi_db": [f.psi for f in fits],
        "extrapolated_sectors": far,
        "inside_reference_sectors": inside,
    }
    return BoundarySeries(distances=phi, threshold=p_min, origin="measured", metadata=meta, fits=fits)


def build_derived_boundary(avg_gamma: float, p_ref: float, d0: float, p_min: float = DEFAULT_P_MIN,
                           shadow_sigma: float = 4.0, n_sectors: int = DEFAULT_N_SECTORS,
                           seed=None) -> BoundarySeries:
    """Isotropic boundary with one path-loss exponent and log-normal shadowing.

    Each sector draws ``psi ~ Normal(0, shadow_sigma**2)`` (dB) from a seeded
    PCG64 generator and inverts the model with ``avg_gamma``.
    """
    if not avg_gamma > 0:
        raise InputError(f"avg_gamma must be positive, got {avg_gamma}")
    if not shadow_sigma >= 0:
        raise InputError(f"shadow_sigma must be nonnegative, got {shadow_sigma}")
    n_sectors = check_positive_int(n_sectors, "n_sectors")
    rng = make_rng(seed)
    psi = rng.normal(0.0, shadow_sigma, n_sectors) if shadow_sigma > 0 else np.zeros(n_sectors)
    phi = invert_path_loss(avg_gamma, psi, d0, p_ref, p_min)
    meta = {
        "seed": seed,
        "generator": GENERATOR_NAME,
        "avg_gamma": float(avg_gamma),
        "shadow_sigma_db": float(shadow_sigma),
        "p_ref_dbm": float(p_ref),
        "d0_m": float(d0),
    }
    return BoundarySeries(distances=phi, threshold=p_min, origin="derived", metadata=meta)


def predict_power(fits, angle, distance):
    """Evaluate each point under the fit of its sector; distance 0 gives ``p_ref``."""
    angle = np.asarray(angle, dtype=float)
    distance = np.asarray(distance, dtype=float)
    k = sector_indices(np.mod(angle, 360.0), len(fits))
    gamma = np.array([f.gamma for f in fits])[k]
    psi = np.array([f.psi for f in fits])[k]
    d0 = np.array([f.d0 for f in fits])[k]
    p_ref = np.array([f.p_ref for f in fits])[k]
    out = np.empty(np.broadcast(angle, distance).shape)
    at_station = distance <= 0
    with np.errstate(divide="ignore"):
        model = p_ref - 10.0 * gamma * np.log10(np.where(at_station, d0, distance) / d0) - psi
    out[...] = np.where(at_station, p_ref, model)
    return out


class SectorPathLoss(RegressorMixin, BaseEstimator):
    """Per-sector log-distance path-loss regressor.

    ``X`` holds ``[angle_deg, distance_m]`` rows and ``y`` received power in dBm.

    Parameters
    ----------
    n_sectors : int, default=120
    reference : {"nearest", "farthest"}, int or (d0, p_ref), default="nearest"
        Reference sample rule for each sector.
    p_min : float, default=-110.0
        Power threshold (dBm) that defines the boundary.

    Attributes
    ----------
    sector_fits_ : list of SectorFit
    gamma_, psi_ : ndarray of shape (n_sectors,)
    boundary_ : BoundarySeries
    """

    def __init__(self, n_sectors=DEFAULT_N_SECTORS, reference="nearest", p_min=DEFAULT_P_MIN):
        self.n_sectors = n_sectors
        self.reference = reference
        self.p_min = p_min

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_features=2)
        samples = [PolarSample(float(a) % 360.0, float(d), float(p)) for (a, d), p in zip(X[:, :2], y)]
        partition = partition_sectors(samples, self.n_sectors)
        self.boundary_ = build_measured_boundary(partition, self.p_min, self.reference)
        self.sector_fits_ = self.boundary_.fits
        self.gamma_ = np.array([f.gamma for f in self.sector_fits_])
        self.psi_ = np.array([f.psi for f in self.sector_fits_])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "sector_fits_")
        X = check_array(X, ensure_min_features=2)
        return predict_power(self.sector_fits_, X[:, 0], X[:, 1])

    def boundary(self, p_min=None) -> BoundarySeries:
        """Boundary at another threshold without refitting."""
        check_is_fitted(self, "sector_fits_")
        p = self.p_min if p_min is None else p_min
        phi = np.array([boundary_distance(f, p) for f in self.sector_fits_])
        return BoundarySeries(phi, p, "measured", dict(self.boundary_.metadata), fits=self.sector_fits_)


def global_fit(samples, reference="nearest") -> SectorFit:
    """Single fit over all samples: the average exponent of the whole cell."""
    return fit_sector(samples, reference, sector_index=0)

