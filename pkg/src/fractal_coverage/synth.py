"""Fractional Gaussian noise and synthetic fractal boundaries with known H."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import GENERATOR_NAME, BoundarySeries, make_rng
from .exceptions import InputError
from .utils import check_finite_scalar, check_positive_int

K_CLIP = 6.0
FGN_METHODS = ("auto", "davies_harte", "hosking")


def fgn_autocovariance(k, hurst: float, sigma: float = 1.0) -> np.ndarray:
    """Autocovariance of fGn at integer lags ``k``."""
    k = np.abs(np.asarray(k, dtype=np.float64))
    two_h = 2.0 * hurst
    return 0.5 * sigma**2 * (np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h)


def _davies_harte(n, hurst, sigma, rng):
    """Circulant embedding; returns ``None`` if the embedding is not nonnegative definite."""
    r = fgn_autocovariance(np.arange(n + 1), hurst, sigma)
    row = np.concatenate([r, r[-2:0:-1]])
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * eig.max():
        return None
    eig = np.clip(eig, 0.0, None)
    m = row.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    y = np.fft.fft(np.sqrt(eig / m) * z)
    return y.real[:n].copy()


def _hosking(n, hurst, sigma, rng):
    """Durbin-Levinson recursion on the exact autocovariance; O(n**2)."""
    r = fgn_autocovariance(np.arange(n), hurst, sigma)
    e = rng.standard_normal(n)
    x = np.empty(n)
    phi = np.zeros(n)
    v = r[0]
    x[0] = math.sqrt(v) * e[0]
    for t in range(1, n):
        prev = phi[: t - 1]
        kappa = (r[t] - np.dot(prev, r[t - 1 : 0 : -1])) / v
        phi[: t - 1] = prev - kappa * prev[::-1]
        phi[t - 1] = kappa
        v *= 1.0 - kappa * kappa
        x[t] = np.dot(phi[:t], x[t - 1 :: -1]) + math.sqrt(max(v, 0.0)) * e[t]
    return x


def fgn(n: int, hurst: float, *, sigma: float = 1.0, seed=None, method: str = "auto",
        return_info: bool = False):
    """Sample fractional Gaussian noise of length ``n``.

    Parameters
    ----------
    n : int
        Series length, at least 2.
    hurst : float
        Target Hurst parameter in (0, 1).
    sigma : float, default=1.0
        Standard deviation of each value.
    seed : int or None
        Seed for the PCG64 generator; equal seeds give identical series.
    method : {"auto", "davies_harte", "hosking"}
        ``"auto"`` uses circulant embedding when ``n`` is a power of two and
        the Hosking recursion otherwise. Circulant embedding falls back to
        Hosking if the embedding has a negative eigenvalue.
    return_info : bool, default=False
        Also return a dict recording the method actually used.

    Returns
    -------
    x : ndarray of shape (n,)
    info : dict, only if ``return_info``
    """
    n = check_positive_int(n, "n", minimum=2)
    hurst = check_finite_scalar(hurst, "hurst")
    sigma = check_finite_scalar(sigma, "sigma")
    if not 0.0 < hurst < 1.0:
        raise InputError(f"hurst must lie in (0, 1), got {hurst}")
    if sigma <= 0:
        raise InputError(f"sigma must be positive, got {sigma}")
    if method not in FGN_METHODS:
        raise InputError(f"method must be one of {FGN_METHODS}, got {method!r}")

    rng = make_rng(seed)
    if method == "auto":
        method = "davies_harte" if n & (n - 1) == 0 else "hosking"
    used, fallback = method, False
    x = None
    if method == "davies_harte":
        x = _davies_harte(n, hurst, sigma, rng)
        if x is None:
            used, fallback = "hosking", True
    if x is None:
        x = _hosking(n, hurst, sigma, rng)
    if return_info:
        return x, {"fgn_method": used, "fgn_fallback": fallback, "generator": GENERATOR_NAME}
    return x


@dataclass(frozen=True)
class FgnConfig:
    h_target: float
    n: int
    seed: int | None = None
    sigma: float = 1.0

    def generate(self, method="auto", return_info=False):
        return fgn(self.n, self.h_target, sigma=self.sigma, seed=self.seed, method=method,
                   return_info=return_info)


@dataclass(frozen=True)
class FractalBoundaryConfig:
    """Parameters of :func:`fractal_boundary`.

    ``base_radius`` must exceed ``amplitude * k_clip`` so every distance is positive.
    """

    h_target: float
    n_sectors: int = 120
    base_radius: float = 1000.0
    amplitude: float = 100.0
    seed: int | None = None
    k_clip: float = K_CLIP

    def __post_init__(self):
        if self.amplitude < 0:
            raise InputError(f"amplitude must be nonnegative, got {self.amplitude}")
        if self.k_clip <= 0:
            raise InputError(f"k_clip must be positive, got {self.k_clip}")
        if not self.base_radius > self.amplitude * self.k_clip:
            raise InputError(
                f"base_radius={self.base_radius} must exceed amplitude*k_clip="
                f"{self.amplitude * self.k_clip} to keep distances positive"
            )


def fractal_boundary(config: FractalBoundaryConfig, method: str = "auto") -> BoundarySeries:
    """Boundary ``base_radius + amplitude * Z`` with ``Z`` standardized, clipped fGn."""
    z, info = fgn(config.n_sectors, config.h_target, seed=config.seed, method=method,
                  return_info=True)
    sd = z.std()
    z = (z - z.mean()) / sd if sd > 0 else np.zeros_like(z)
    clip_count = int(np.count_nonzero(np.abs(z) > config.k_clip))
    z = np.clip(z, -config.k_clip, config.k_clip)
    phi = config.base_radius + config.amplitude * z
    if np.any(phi <= 0):
        raise InputError("fractal boundary produced a nonpositive distance")
    meta = {
        "h_target": config.h_target,
        "seed": config.seed,
        "base_radius_m": config.base_radius,
        "amplitude_m": config.amplitude,
        "k_clip": config.k_clip,
        "clip_count": clip_count,
        **info,
    }
    return BoundarySeries(distances=phi, threshold=None, origin="synthetic", metadata=meta)
