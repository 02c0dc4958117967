"""Synthetic drive tests whose reconstructed boundary is known in advance."""

from __future__ import annotations

import numpy as np

from .boundary import BoundarySeries
from .geo_ingest import DriveTestSample, StationConfig, haversine, unproject_local
from .pathloss import DEFAULT_P_MIN

DEFAULT_STATION = StationConfig(latitude=31.202252, longitude=121.451055)


def drive_test_from_boundary(boundary: BoundarySeries, station: StationConfig = DEFAULT_STATION,
                             gamma: float = 3.5, p_min: float = DEFAULT_P_MIN,
                             fractions=(0.2, 0.35, 0.5, 0.65, 0.8)) -> list[DriveTestSample]:
    """Noiseless drive test that reproduces ``boundary`` under sector fitting.

    The route visits sectors in order; within sector ``k`` it runs outward
    along the sector-center ray through ``fractions * phi_k``. Each power is
    ``p_min + 10*gamma*log10(phi_k / d)`` with ``d`` the great-circle distance
    of the generated position, so the fitted boundary at ``p_min`` returns
    ``phi_k`` to rounding error.
    """
    samples = []
    t = 0.0
    for theta, phi in zip(np.radians(boundary.angles), boundary.distances):
        d = phi * np.asarray(fractions, dtype=float)
        lat, lon = unproject_local(d * np.cos(theta), d * np.sin(theta), station)
        d_true = haversine(station.latitude, station.longitude, lat, lon)
        power = p_min + 10.0 * gamma * np.log10(phi / d_true)
        for la, lo, p in zip(lat, lon, power):
            samples.append(DriveTestSample(float(la), float(lo), float(p), t))
            t += 1.0
    return samples


ISOTROPIC_RADIUS_M = 1500.0
FRACTAL_FIXTURE = {"h_target": 0.9, "n_sectors": 1024, "base_radius": 1000.0, "amplitude": 150.0, "seed": 2014}


def bundled_fixtures() -> dict:
    """File name -> text of the bundled fixtures (deterministic)."""
    from .geo_ingest import format_station_config, serialize_drive_test
    from .synth import FractalBoundaryConfig, fractal_boundary

    iso = BoundarySeries(np.full(120, ISOTROPIC_RADIUS_M), None, "synthetic")
    frac = fractal_boundary(FractalBoundaryConfig(**FRACTAL_FIXTURE))
    return {
        "station.cfg": format_station_config(DEFAULT_STATION),
        "isotropic_drive_test.csv": serialize_drive_test(drive_test_from_boundary(iso)),
        "fractal_drive_test.csv": serialize_drive_test(drive_test_from_boundary(frac)),
        "fractal_boundary_truth.csv": frac.to_csv(),
    }
