"""Drive-test ingestion: CSV parsing, polar coordinates about the station, power smoothing."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DriveTestParseError, InputError

EARTH_RADIUS_M = 6_371_000.0
SPEED_OF_LIGHT = 299_792_458.0
CSV_HEADER = ("lat", "lon", "rssi_dbm", "timestamp")


@dataclass(frozen=True)
class DriveTestSample:
    latitude: float
    longitude: float
    rssi: float
    timestamp: float | None = None


@dataclass(frozen=True)
class PolarSample:
    """A sample about the station; ``angle`` in degrees counterclockwise from east."""

    angle: float
    distance: float
    rssi: float


@dataclass(frozen=True)
class StationConfig:
    """Base-station position and radio parameters.

    Defaults other than the position are typical urban macro-cell values:
    38 dBm, 2.6 GHz, 0.5 dB feeder loss, 12 dBi / 3 dBi antenna gains.
    """

    latitude: float
    longitude: float
    tx_power: float = 38.0
    carrier_frequency: float = 2.6e9
    feeder_loss: float = 0.5
    tx_gain: float = 12.0
    rx_gain: float = 3.0

    def __post_init__(self):
        _check_coordinate(self.latitude, self.longitude)
        if not math.isfinite(self.tx_power):
            raise InputError("tx_power must be finite")
        if not (self.carrier_frequency > 0 and math.isfinite(self.carrier_frequency)):
            raise InputError(f"carrier_frequency must be positive, got {self.carrier_frequency}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    def reference_power(self, d0: float) -> float:
        """Free-space received power in dBm at ``d0`` meters (Friis, link budget of this station)."""
        if d0 <= 0:
            raise InputError(f"reference distance must be positive, got {d0}")
        fspl = 20.0 * math.log10(4.0 * math.pi * d0 / self.wavelength)
        return self.tx_power - self.feeder_loss + self.tx_gain + self.rx_gain - fspl


STATION_KEYS = {
    "lat": "latitude",
    "lon": "longitude",
    "tx_power_dbm": "tx_power",
    "freq_hz": "carrier_frequency",
    "feeder_loss_db": "feeder_loss",
    "tx_gain_dbi": "tx_gain",
    "rx_gain_dbi": "rx_gain",
}


def parse_station_config(text: str) -> StationConfig:
    """Parse a ``key = value`` station file. ``lat`` and ``lon`` are required."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in STATION_KEYS:
            raise InputError(f"station config line {lineno}: unrecognised entry {raw.strip()!r}")
        try:
            values[STATION_KEYS[key]] = float(value)
        except ValueError:
            raise InputError(f"station config line {lineno}: {key} is not a number") from None
    missing = [k for k in ("lat", "lon") if STATION_KEYS[k] not in values]
    if missing:
        raise InputError(f"station config is missing required keys: {', '.join(missing)}")
    return StationConfig(**values)


def format_station_config(station: StationConfig) -> str:
    return "".join(f"{k} = {getattr(station, attr)!r}\n" for k, attr in STATION_KEYS.items())


def _check_coordinate(lat, lon, row=None):
    if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
        raise DriveTestParseError(f"latitude {lat} outside [-90, 90]", row=row, field="lat")
    if not (math.isfinite(lon) and -180.0 <= lon <= 180.0):
        raise DriveTestParseError(f"longitude {lon} outside [-180, 180]", row=row, field="lon")


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def parse_drive_test(source) -> list[DriveTestSample]:
    """Parse drive-test CSV from bytes, text, or a file object.

    The header must be ``lat,lon,rssi_dbm,timestamp`` (the timestamp column
    may be omitted entirely, or left empty per row). Errors carry the 1-based
    line number and the offending field.
    """
    text = _read_text(source).lstrip("\ufeff")
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DriveTestParseError("empty input") from None
    if tuple(header) not in (CSV_HEADER, CSV_HEADER[:3]):
        raise DriveTestParseError(f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}", row=1)

    samples = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) not in (3, 4):
            raise DriveTestParseError(f"expected 3 or 4 fields, got {len(row)}", row=lineno)
        parsed = []
        for name, cell in zip(CSV_HEADER[:3], row[:3]):
            try:
                value = float(cell)
            except ValueError:
                raise DriveTestParseError(f"not a number: {cell!r}", row=lineno, field=name) from None
            if not math.isfinite(value):
                raise DriveTestParseError(f"non-finite value {cell!r}", row=lineno, field=name)
            parsed.append(value)
        lat, lon, rssi = parsed
        _check_coordinate(lat, lon, row=lineno)
        ts = None
        if len(row) == 4 and row[3].strip():
            try:
                ts = float(row[3])
            except ValueError:
                raise DriveTestParseError(f"not a number: {row[3]!r}", row=lineno, field="timestamp") from None
        samples.append(DriveTestSample(lat, lon, rssi, ts))
    if not samples:
        raise DriveTestParseError("empty input: no data rows")
    return samples


def serialize_drive_test(samples) -> str:
    lines = [",".join(CSV_HEADER)]
    for s in samples:
        ts = "" if s.timestamp is None else repr(float(s.timestamp))
        lines.append(f"{float(s.latitude)!r},{float(s.longitude)!r},{float(s.rssi)!r},{ts}")
    return "\n".join(lines) + "\n"


# -- geometry --------------------------------------------------------------------


def haversine(lat1, lon1, lat2, lon2, radius: float = EARTH_RADIUS_M):
    """Great-circle distance in meters; accepts scalars or arrays (degrees)."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(np.asarray(lon2) - np.asarray(lon1))
    a = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2) ** 2
    return 2.0 * radius * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def project_local(lat, lon, station: StationConfig):
    """Equirectangular east/north offsets in meters about the station."""
    lat0 = math.radians(station.latitude)
    east = EARTH_RADIUS_M * np.radians(np.asarray(lon, dtype=float) - station.longitude) * math.cos(lat0)
    north = EARTH_RADIUS_M * np.radians(np.asarray(lat, dtype=float) - station.latitude)
    return east, north


def unproject_local(east, north, station: StationConfig):
    """Inverse of :func:`project_local`; returns ``(lat, lon)`` in degrees."""
    lat0 = math.radians(station.latitude)
    lat = station.latitude + np.degrees(np.asarray(north, dtype=float) / EARTH_RADIUS_M)
    lon = station.longitude + np.degrees(np.asarray(east, dtype=float) / (EARTH_RADIUS_M * math.cos(lat0)))
    return lat, lon


def polar_coordinates(lat, lon, station: StationConfig):
    """Angle (degrees in [0, 360), counterclockwise from east) and haversine distance."""
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    east, north = project_local(lat, lon, station)
    angle = np.mod(np.degrees(np.arctan2(north, east)), 360.0)
    # mod can round a tiny negative angle up to exactly 360
    angle = np.where(angle >= 360.0, 0.0, angle)
    distance = haversine(station.latitude, station.longitude, lat, lon)
    return angle, distance


def to_polar(samples, station: StationConfig) -> list[PolarSample]:
    if not samples:
        return []
    lat = np.array([s.latitude for s in samples])
    lon = np.array([s.longitude for s in samples])
    angle, distance = polar_coordinates(lat, lon, station)
    zero = np.flatnonzero(distance <= 0.0)
    if zero.size:
        raise InputError(f"samples coincide with the station location at indices {zero.tolist()}")
    return [PolarSample(float(a), float(d), float(s.rssi)) for a, d, s in zip(angle, distance, samples)]


def route_arc_length(samples) -> np.ndarray:
    """Cumulative route distance, from the planar positions implied by (angle, distance)."""
    theta = np.radians([s.angle for s in samples])
    d = np.array([s.distance for s in samples], dtype=float)
    x, y = d * np.cos(theta), d * np.sin(theta)
    steps = np.hypot(np.diff(x), np.diff(y))
    return np.concatenate([[0.0], np.cumsum(steps)])


def smooth_power(samples, station: StationConfig, window_wavelengths: float = 40) -> list[PolarSample]:
    """Average received power (in dBm) over a trailing route window.

    Sample ``i`` is replaced by the mean over samples ``j`` whose route
    position satisfies ``s_i - W < s_j <= s_i``, with
    ``W = window_wavelengths * wavelength``. Samples sharing a route position
    (co-located) always share a window.
    """
    if not window_wavelengths > 0:
        raise InputError(f"window must be positive, got {window_wavelengths}")
    if not samples:
        return []
    width = window_wavelengths * station.wavelength
    s = route_arc_length(samples)
    rssi = np.array([p.rssi for p in samples], dtype=float)
    start = np.searchsorted(s, s - width, side="right")
    stop = np.searchsorted(s, s, side="right")
    csum = np.concatenate([[0.0], np.cumsum(rssi)])
    mean = (csum[stop] - csum[start]) / (stop - start)
    # exact values for single-sample windows, free of cumulative-sum rounding
    mean = np.where(stop - start == 1, rssi, mean)
    return [PolarSample(p.angle, p.distance, float(m)) for p, m in zip(samples, mean)]


class PolarProjector(TransformerMixin, BaseEstimator):
    """Transform ``[lat, lon]`` rows into ``[angle_deg, distance_m]`` about a station.

    Parameters
    ----------
    station_lat, station_lon : float
        Station position in degrees.
    """

    def __init__(self, station_lat=31.202252, station_lon=121.451055):
        self.station_lat = station_lat
        self.station_lon = station_lon

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=2)
        self.station_ = StationConfig(self.station_lat, self.station_lon)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = check_array(X, ensure_min_features=2)
        check_is_fitted(self, "station_")
        angle, distance = polar_coordinates(X[:, 0], X[:, 1], self.station_)
        return np.column_stack([angle, distance])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["angle_deg", "distance_m"], dtype=object)
