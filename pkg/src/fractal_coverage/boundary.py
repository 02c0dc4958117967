"""The boundary distance series shared by the path-loss and synthesis modules."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError

ORIGINS = ("measured", "derived", "synthetic")

# all seeded draws in the package come from this bit generator
GENERATOR_NAME = "numpy.random.PCG64"


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class BoundarySeries:
    """Boundary distances ``phi_k`` (meters), one per angular sector.

    ``metadata`` carries provenance (seed, generator, per-sector fit values,
    clip counts); it is echoed into the CSV comment header.
    """

    distances: np.ndarray
    threshold: float | None
    origin: str
    metadata: dict = field(default_factory=dict)
    fits: list | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.distances = np.asarray(self.distances, dtype=np.float64)
        if self.origin not in ORIGINS:
            raise InputError(f"origin must be one of {ORIGINS}, got {self.origin!r}")
        if self.distances.ndim != 1 or self.distances.size == 0:
            raise InputError("distances must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.distances)) or np.any(self.distances <= 0):
            bad = np.flatnonzero(~(self.distances > 0) | ~np.isfinite(self.distances))
            raise InputError(f"boundary distances must be finite and positive; bad sectors {bad.tolist()}")

    @property
    def n_sectors(self) -> int:
        return int(self.distances.size)

    @property
    def sector_width(self) -> float:
        return 360.0 / self.n_sectors

    @property
    def angles(self) -> np.ndarray:
        """Sector-center angles in degrees, counterclockwise from east."""
        return (np.arange(self.n_sectors) + 0.5) * self.sector_width

    def summary(self) -> dict:
        d = self.distances
        return {
            "n_sectors": self.n_sectors,
            "min_m": float(d.min()),
            "max_m": float(d.max()),
            "mean_m": float(d.mean()),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# origin = {self.origin}\n")
        buf.write(f"# threshold_dbm = {'' if self.threshold is None else repr(float(self.threshold))}\n")
        for key in sorted(self.metadata):
            value = self.metadata[key]
            if isinstance(value, (list, tuple, np.ndarray)):
                value = " ".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)
                                 for v in np.asarray(value).tolist())
            buf.write(f"# {key} = {value}\n")
        buf.write("sector,angle_deg,phi_m\n")
        for k, (a, d) in enumerate(zip(self.angles, self.distances)):
            buf.write(f"{k},{a!r},{float(d)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> BoundarySeries:
        meta = {}
        rows = []
        header_seen = False
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if line.strip() != "sector,angle_deg,phi_m":
                    raise InputError(f"line {lineno}: expected header 'sector,angle_deg,phi_m'")
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise InputError(f"line {lineno}: expected 3 fields, got {len(parts)}")
            try:
                rows.append((int(parts[0]), float(parts[2])))
            except ValueError:
                raise InputError(f"line {lineno}: unparsable boundary row {line!r}") from None
        if not rows:
            raise InputError("boundary file has no data rows")
        rows.sort()
        if [k for k, _ in rows] != list(range(len(rows))):
            raise InputError("boundary sectors must be numbered 0..n-1 without gaps")
        origin = meta.pop("origin", "measured")
        thr = meta.pop("threshold_dbm", "")
        return cls(
            distances=np.array([d for _, d in rows]),
            threshold=float(thr) if thr else None,
            origin=origin,
            metadata=meta,
        )
