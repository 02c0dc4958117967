"""Hurst parameter estimation: periodogram, rescaled range and variance-time.

Every estimator reduces to a least-squares line through log10-log10 points;
the Hurst parameter is a fixed affine function of that line's slope:

* periodogram:   ``h = (1 + alpha) / 2`` with ``alpha = -slope`` of log I(w) vs log w
* rescaled range: ``h = slope`` of log mean R/S vs log n
* variance-time: ``h = 1 - beta / 2`` with ``beta = -slope`` of log Var(X^(m)) vs log m
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateSeriesError, InputError, ShortSeriesWarning
from .utils import (
    MIN_ESTIMATION_LENGTH,
    MIN_SERIES_LENGTH,
    check_nonconstant,
    check_positive_int,
    check_series,
)

METHODS = ("periodogram", "rs", "variance_time")

GRID_START = 8
GRID_RATIO = math.sqrt(2.0)


def hurst_from_alpha(alpha: float) -> float:
    return (1.0 + alpha) / 2.0


def hurst_from_beta(beta: float) -> float:
    return 1.0 - beta / 2.0


def hurst_from_slope(method: str, slope: float) -> float:
    """Map the stored slope of a :class:`HurstEstimate` to ``h``.

    The stored slope is ``alpha`` for the periodogram, the R/S slope itself,
    and ``-beta`` for variance-time.
    """
    if method == "periodogram":
        return hurst_from_alpha(slope)
    if method == "rs":
        return float(slope)
    if method == "variance_time":
        return hurst_from_beta(-slope)
    raise InputError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass(frozen=True)
class HurstEstimate:
    """Result of one estimator.

    ``log10_x``/``log10_y`` are the regression points, kept for plotting.
    ``intercept`` is the log10 intercept of the fitted line.
    """

    method: str
    h: float
    slope: float
    n_points: int
    r_squared: float
    intercept: float = float("nan")
    log10_x: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False, compare=False)
    log10_y: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        if self.h != hurst_from_slope(self.method, self.slope):
            raise InputError("h is inconsistent with the stored slope")

    @classmethod
    def from_slope(cls, method, slope, n_points, r_squared, intercept=float("nan"),
                   log10_x=None, log10_y=None):
        slope = float(slope)
        return cls(
            method=method,
            h=hurst_from_slope(method, slope),
            slope=slope,
            n_points=int(n_points),
            r_squared=float(r_squared),
            intercept=float(intercept),
            log10_x=np.empty(0) if log10_x is None else np.asarray(log10_x, dtype=float),
            log10_y=np.empty(0) if log10_y is None else np.asarray(log10_y, dtype=float),
        )

    def as_row(self) -> str:
        return f"{self.method},{self.h!r},{self.slope!r},{self.n_points},{self.r_squared!r}"


def _loglog_fit(log_x, log_y, weights=None):
    """(Weighted) least-squares line; returns slope, intercept, r_squared."""
    log_x = np.asarray(log_x, dtype=float)
    log_y = np.asarray(log_y, dtype=float)
    if weights is None:
        res = stats.linregress(log_x, log_y)
        slope, intercept, r2 = float(res.slope), float(res.intercept), float(res.rvalue) ** 2
    else:
        w = np.asarray(weights, dtype=float) / np.sum(weights)
        xm, ym = np.dot(w, log_x), np.dot(w, log_y)
        sxx = np.dot(w, (log_x - xm) ** 2)
        sxy = np.dot(w, (log_x - xm) * (log_y - ym))
        syy = np.dot(w, (log_y - ym) ** 2)
        slope = float(sxy / sxx)
        intercept = float(ym - slope * xm)
        r2 = float(sxy * sxy / (sxx * syy)) if syy > 0 else 1.0
    if not np.isfinite(r2):
        r2 = 1.0
    return slope, intercept, min(max(r2, 0.0), 1.0)


def _signed_slope(method, log_x, log_y, weights=None):
    slope = _loglog_fit(log_x, log_y, weights)[0]
    return -slope if method == "periodogram" else slope


def _prepare(series, min_length, allow_short):
    floor = MIN_SERIES_LENGTH if allow_short else min_length
    x = check_series(series, min_length=floor)
    check_nonconstant(x)
    if x.size < min_length:
        warnings.warn(
            f"series of length {x.size} is below the recommended {min_length}; "
            "estimates are unreliable",
            ShortSeriesWarning,
            stacklevel=3,
        )
    return x


def block_sizes(n: int, start: int = GRID_START, ratio: float = GRID_RATIO) -> np.ndarray:
    """Geometric grid of block sizes ``floor(start * ratio**j)`` capped at ``n // 4``.

    >>> block_sizes(200).tolist()
    [8, 11, 16, 22, 32, 45]
    >>> block_sizes(64, start=1).tolist()
    [1, 2, 4, 5, 8, 11, 16]
    """
    cap = n // 4
    sizes = []
    j = 0
    while True:
        m = int(math.floor(start * ratio**j + 1e-9))
        if m > cap:
            break
        if not sizes or m != sizes[-1]:
            sizes.append(m)
        j += 1
    return np.asarray(sizes, dtype=np.int64)


# -- periodogram ---------------------------------------------------------------


def periodogram(series):
    """Periodogram at the positive Fourier frequencies.

    Returns ``(w, I)`` with ``w_j = 2*pi*j/N`` for ``j = 1..floor((N-1)/2)`` and
    ``I(w_j) = |sum_t X_t exp(-i w_j t)|**2 / (2*pi*N)``. The zero frequency is
    excluded.
    """
    x = check_series(series, min_length=MIN_SERIES_LENGTH)
    n = x.size
    n_freq = (n - 1) // 2
    spectrum = np.fft.rfft(x)[1 : n_freq + 1]
    intensity = (spectrum.real**2 + spectrum.imag**2) / (2.0 * np.pi * n)
    freqs = 2.0 * np.pi * np.arange(1, n_freq + 1) / n
    return freqs, intensity


def periodogram_hurst(series, low_fraction: float = 0.1, allow_short: bool = False) -> HurstEstimate:
    """Hurst parameter from the low-frequency slope of the periodogram.

    Parameters
    ----------
    series : array-like of shape (N,)
    low_fraction : float, default=0.1
        Fraction of the positive Fourier frequencies, lowest first, used in the
        regression. At least three frequencies are always used.
    allow_short : bool, default=False
        Accept ``N >= 16`` (with a :class:`ShortSeriesWarning`) instead of ``N >= 64``.
    """
    if not 0.0 < low_fraction <= 1.0:
        raise InputError(f"low_fraction must lie in (0, 1], got {low_fraction}")
    x = _prepare(series, MIN_ESTIMATION_LENGTH, allow_short)
    freqs, intensity = periodogram(x)
    count = max(3, int(math.floor(low_fraction * freqs.size + 1e-12)))
    count = min(count, freqs.size)
    w, dens = freqs[:count], intensity[:count]
    # ordinates at FFT rounding level count as zero
    keep = dens > (64 * np.finfo(float).eps) ** 2 * float(np.dot(x, x)) / (2.0 * np.pi)
    if np.count_nonzero(keep) < 3:
        raise DegenerateSeriesError(
            "fewer than 3 nonzero periodogram ordinates in the low-frequency range"
        )
    lx, ly = np.log10(w[keep]), np.log10(dens[keep])
    slope, intercept, r2 = _loglog_fit(lx, ly)
    return HurstEstimate.from_slope("periodogram", -slope, lx.size, r2, intercept, lx, ly)


# -- rescaled range ------------------------------------------------------------


def rs_statistic(series, n: int) -> float:
    """Rescaled adjusted range of the first ``n`` values.

    ``R(n)`` is the range of ``Y(t) - (t/n) Y(n)`` over ``0 <= t <= n`` with the
    ``t = 0`` term (zero) included; ``S(n)`` is the population standard deviation.
    """
    x = np.asarray(series, dtype=np.float64)
    n = check_positive_int(n, "n")
    if n > x.size:
        raise InputError(f"n={n} exceeds the series length {x.size}")
    x = x[:n]
    partial = np.cumsum(x)
    total = partial[-1]
    mean = total / n
    # sequential accumulation, matching the summation in the definition
    s2 = np.cumsum((x - mean) ** 2)[-1] / n
    if not s2 > 0.0:
        raise DegenerateSeriesError(f"S({n}) = 0: the first {n} values are constant")
    t = np.arange(1, n + 1)
    adjusted = partial - (t / n) * total
    r = max(0.0, float(adjusted.max())) - min(0.0, float(adjusted.min()))
    return r / math.sqrt(s2)


def _block_rs(blocks: np.ndarray) -> np.ndarray:
    """R/S of each row; NaN where the row is (numerically) constant."""
    n = blocks.shape[1]
    partial = np.cumsum(blocks, axis=1)
    total = partial[:, -1:]
    mean = total / n
    s = np.sqrt(np.mean((blocks - mean) ** 2, axis=1))
    t = np.arange(1, n + 1)
    adjusted = partial - (t / n) * total
    r = np.maximum(adjusted.max(axis=1), 0.0) - np.minimum(adjusted.min(axis=1), 0.0)
    scale = np.max(np.abs(blocks), axis=1)
    usable = s > 1e-12 * np.where(scale > 0, scale, 1.0)
    out = np.full(blocks.shape[0], np.nan)
    out[usable] = r[usable] / s[usable]
    return out


def _mean_block_rs(x: np.ndarray, n: int) -> float:
    k = x.size // n
    head = _block_rs(x[: k * n].reshape(k, n))
    if x.size % n:
        # a second tiling aligned to the end covers the dropped remainder
        # and keeps the estimate symmetric under time reversal
        head = np.concatenate([head, _block_rs(x[x.size - k * n:].reshape(k, n))])
    head = head[np.isfinite(head)]
    return float(np.mean(head)) if head.size else float("nan")


def _anis_lloyd(n: int) -> float:
    """Expected R/S of ``n`` i.i.d. Gaussian values (Anis-Lloyd with Peters' factor)."""
    i = np.arange(1, n)
    total = float(np.sum(np.sqrt((n - i) / i)))
    if n <= 340:
        lead = math.exp(special.gammaln((n - 1) / 2.0) - special.gammaln(n / 2.0)) / math.sqrt(math.pi)
    else:
        lead = 1.0 / math.sqrt(n * math.pi / 2.0)
    return (n - 0.5) / n * lead * total


def _fixed_point(log_x, log_y, correction, method, weights=None):
    """Return ``log_y + correction(h)`` at the fixed point ``h = H(slope)``.

    ``correction`` is evaluated with h clipped to [0.01, 0.99].
    """
    h = hurst_from_slope(method, _signed_slope(method, log_x, log_y, weights))
    for _ in range(200):
        hc = min(max(h, 0.01), 0.99)
        h_new = hurst_from_slope(method, _signed_slope(method, log_x, log_y + correction(hc), weights))
        converged = abs(h_new - h) < 1e-12
        h = h_new
        if converged:
            break
    return log_y + correction(min(max(h, 0.01), 0.99))


def rs_hurst(series, allow_short: bool = False, bias_correction: bool = True) -> HurstEstimate:
    """Hurst parameter as the slope of log10 mean R/S against log10 block size.

    R/S is averaged over the disjoint blocks of each size on the geometric
    :func:`block_sizes` grid. When the size does not divide ``N`` the blocks
    are laid out twice, from the start and from the end, and both tilings
    enter the average. Blocks with zero variance are skipped; a block size
    with no usable block is dropped from the regression.

    With ``bias_correction`` the block means are adjusted before the fit for
    two small-block effects, evaluated at the current estimate of H and
    iterated to a fixed point:

    * centering on the block mean shrinks ``E[S(n)**2]`` by ``1 - n**(2H-2)``
      (exact for fractional Gaussian noise);
    * sampling the partial-sum bridge at ``n`` points shortens its range; the
      deficit is taken from the Anis-Lloyd i.i.d. expectation and scaled by
      ``n**(0.5-H)``, the order of the discretization error of an extreme of
      fractional Brownian motion.

    At ``H = 0.5`` this is the Anis-Lloyd-Peters corrected R/S.
    """
    x = _prepare(series, MIN_ESTIMATION_LENGTH, allow_short)
    sizes = block_sizes(x.size)
    rs = np.array([_mean_block_rs(x, int(n)) for n in sizes])
    ok = np.isfinite(rs) & (rs > 0)
    if np.count_nonzero(ok) < 3:
        raise DegenerateSeriesError("fewer than 3 block sizes with a defined R/S statistic")
    n = sizes[ok].astype(float)
    lx, ly = np.log10(n), np.log10(rs[ok])
    if bias_correction:
        iid = np.array([_anis_lloyd(int(k)) for k in n])
        discrete = np.log10(iid * np.sqrt(1.0 - 1.0 / n) / np.sqrt(n * math.pi / 2.0))

        def correction(h):
            return 0.5 * np.log10(1.0 - n ** (2.0 * h - 2.0)) - discrete * n ** (0.5 - h)

        ly = _fixed_point(lx, ly, correction, "rs")
    slope, intercept, r2 = _loglog_fit(lx, ly)
    return HurstEstimate.from_slope("rs", slope, lx.size, r2, intercept, lx, ly)


# -- variance-time -------------------------------------------------------------


def aggregate(series, m: int) -> np.ndarray:
    """Block means of length ``m``; a trailing partial block is dropped."""
    x = np.asarray(series, dtype=np.float64).ravel()
    m = check_positive_int(m, "m")
    if m > x.size:
        raise InputError(f"block size m={m} exceeds the series length {x.size}")
    k = x.size // m
    return x[: k * m].reshape(k, m).mean(axis=1)


def variance_time_hurst(series, allow_short: bool = False, bias_correction: bool = True) -> HurstEstimate:
    """Hurst parameter from the decay of the aggregated-series variance.

    Uses the unbiased sample variance of ``aggregate(series, m)`` for ``m`` on
    the grid ``block_sizes(N, start=1)``. The variance law holds exactly at
    every ``m`` for fractional Gaussian noise, so the grid starts at ``m = 1``
    where the variance estimates are least noisy.

    With ``bias_correction`` each log variance from ``k`` blocks is adjusted
    for the mean of ``log chi2_(k-1)/(k-1)`` and for centering on the sample
    mean, which scales the expected variance by
    ``(k - k**(2H-1)) / (k - 1)`` for fractional Gaussian noise. The second
    term depends on H and is resolved by fixed-point iteration. The line is
    then fitted by weighted least squares with weights equal to the inverse
    variance of the log chi-square term, so the largest block sizes (fewest
    blocks) count least.
    """
    x = _prepare(series, MIN_ESTIMATION_LENGTH, allow_short)
    sizes = block_sizes(x.size, start=1)
    variances = []
    for m in sizes:
        agg = aggregate(x, int(m))
        if agg.size < 2:
            raise DegenerateSeriesError(f"aggregated series at m={m} has fewer than 2 blocks")
        variances.append(np.var(agg, ddof=1))
    variances = np.asarray(variances)
    ok = variances > 0.0
    if np.count_nonzero(ok) < 3:
        raise DegenerateSeriesError("fewer than 3 aggregation levels with nonzero variance")
    m = sizes[ok]
    lx, ly = np.log10(m.astype(float)), np.log10(variances[ok])
    if bias_correction:
        k = (x.size // m).astype(float)
        log_chi2 = (special.digamma((k - 1.0) / 2.0) - np.log((k - 1.0) / 2.0)) / math.log(10.0)
        ly = ly - log_chi2

        def correction(h):
            return -np.log10((k - k ** (2.0 * h - 1.0)) / (k - 1.0))

        # var(log chi2_(k-1)) = trigamma((k-1)/2): fewer blocks, less weight
        weights = 1.0 / special.polygamma(1, (k - 1.0) / 2.0)
        ly = _fixed_point(lx, ly, correction, "variance_time", weights)
    else:
        weights = None
    slope, intercept, r2 = _loglog_fit(lx, ly, weights)
    return HurstEstimate.from_slope("variance_time", slope, lx.size, r2, intercept, lx, ly)


def estimate_all(series, low_fraction: float = 0.1, allow_short: bool = False) -> dict:
    """Run all three estimators.

    Returns a dict keyed by method name; a method whose estimate is undefined
    maps to the :class:`DegenerateSeriesError` it raised instead of an estimate.
    """
    out = {}
    runners = {
        "periodogram": lambda x: periodogram_hurst(x, low_fraction, allow_short=allow_short),
        "rs": lambda x: rs_hurst(x, allow_short=allow_short),
        "variance_time": lambda x: variance_time_hurst(x, allow_short=allow_short),
    }
    for method, run in runners.items():
        try:
            out[method] = run(series)
        except DegenerateSeriesError as exc:
            out[method] = exc
    return out


# -- estimator API ---------------------------------------------------------------


class _HurstBase(BaseEstimator):
    method = ""

    def __init__(self, allow_short=False):
        self.allow_short = allow_short

    def _estimate(self, x):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Estimate the Hurst parameter of the 1-D series ``X``."""
        self.estimate_ = self._estimate(X)
        self.hurst_ = self.estimate_.h
        self.n_samples_ = int(np.asarray(X).size)
        return self

    @property
    def slope_(self):
        check_is_fitted(self, "estimate_")
        return self.estimate_.slope


class PeriodogramHurst(_HurstBase):
    """Periodogram estimator.

    Parameters
    ----------
    low_fraction : float, default=0.1
        Share of the lowest Fourier frequencies entering the regression.
    allow_short : bool, default=False

    Attributes
    ----------
    estimate_ : HurstEstimate
    hurst_ : float
    """

    method = "periodogram"

    def __init__(self, low_fraction=0.1, allow_short=False):
        self.low_fraction = low_fraction
        self.allow_short = allow_short

    def _estimate(self, x):
        return periodogram_hurst(x, self.low_fraction, allow_short=self.allow_short)


class RescaledRangeHurst(_HurstBase):
    """Rescaled adjusted range (R/S) estimator."""

    method = "rs"

    def _estimate(self, x):
        return rs_hurst(x, allow_short=self.allow_short)


class VarianceTimeHurst(_HurstBase):
    """Aggregated variance (variance-time) estimator."""

    method = "variance_time"

    def _estimate(self, x):
        return variance_time_hurst(x, allow_short=self.allow_short)


class HurstTransformer(TransformerMixin, BaseEstimator):
    """Map each row of ``X`` (one series per row) to its three Hurst estimates.

    Stateless; ``fit`` only records the input width. Output columns follow
    :data:`METHODS`. An undefined estimate becomes NaN.

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> HurstTransformer().fit_transform(rng.standard_normal((2, 1024))).shape
    (2, 3)
    """

    def __init__(self, low_fraction=0.1, allow_short=False):
        self.low_fraction = low_fraction
        self.allow_short = allow_short

    def fit(self, X, y=None):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full((X.shape[0], len(METHODS)), np.nan)
        for i, row in enumerate(X):
            res = estimate_all(row, self.low_fraction, self.allow_short)
            for j, method in enumerate(METHODS):
                if isinstance(res[method], HurstEstimate):
                    out[i, j] = res[method].h
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray([f"hurst_{m}" for m in METHODS], dtype=object)
