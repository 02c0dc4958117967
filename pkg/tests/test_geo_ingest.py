import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from fractal_coverage.exceptions import DriveTestParseError, InputError
from fractal_coverage.geo_ingest import (
    DriveTestSample,
    PolarProjector,
    PolarSample,
    StationConfig,
    haversine,
    parse_drive_test,
    parse_station_config,
    format_station_config,
    project_local,
    serialize_drive_test,
    smooth_power,
    to_polar,
    unproject_local,
)

HEADER = "lat,lon,rssi_dbm,timestamp\n"


# -- parsing ---------------------------------------------------------------------


def test_parse_single_row():
    (s,) = parse_drive_test(HEADER + "31.2022,121.4510,-95.0,0\n")
    assert (s.latitude, s.longitude, s.rssi, s.timestamp) == (31.2022, 121.4510, -95.0, 0.0)


def test_parse_bytes_file_object_and_bom():
    raw = ("\ufeff" + HEADER + "31.2,121.4,-90,\n31.3,121.5,-91,2.5\n").encode("utf-8")
    for source in (raw, io.BytesIO(raw), io.StringIO(raw.decode("utf-8"))):
        samples = parse_drive_test(source)
        assert [s.rssi for s in samples] == [-90.0, -91.0]
        assert samples[0].timestamp is None and samples[1].timestamp == 2.5


def test_parse_three_column_header():
    (s,) = parse_drive_test("lat,lon,rssi_dbm\n10,20,-80\n")
    assert s.timestamp is None


def test_header_only_is_empty_input():
    with pytest.raises(DriveTestParseError, match="empty"):
        parse_drive_test(HEADER)
    with pytest.raises(DriveTestParseError, match="empty"):
        parse_drive_test("")


def test_nan_rssi_names_row_and_field():
    with pytest.raises(DriveTestParseError) as info:
        parse_drive_test(HEADER + "31.2,121.4,-90,0\n31.2,121.4,NaN,1\n")
    assert info.value.row == 3
    assert info.value.field == "rssi_dbm"
    assert "row 3" in str(info.value) and "rssi_dbm" in str(info.value)


@pytest.mark.parametrize("row, field", [
    ("91,0,-90,0", "lat"),
    ("0,181,-90,0", "lon"),
    ("abc,0,-90,0", "lat"),
    ("0,0,-90,t0", "timestamp"),
])
def test_bad_fields_rejected(row, field):
    with pytest.raises(DriveTestParseError) as info:
        parse_drive_test(HEADER + row + "\n")
    assert info.value.field == field and info.value.row == 2


def test_wrong_header_and_field_count():
    with pytest.raises(DriveTestParseError):
        parse_drive_test("latitude,longitude,power\n1,2,3\n")
    with pytest.raises(DriveTestParseError, match="fields"):
        parse_drive_test(HEADER + "1,2\n")


finite = dict(allow_nan=False, allow_infinity=False)
samples_strategy = st.lists(
    st.builds(
        DriveTestSample,
        st.floats(-90, 90, **finite),
        st.floats(-180, 180, **finite),
        st.floats(-200, 50, **finite),
        st.one_of(st.none(), st.floats(0, 1e9, **finite)),
    ),
    min_size=1,
    max_size=30,
)


@settings(max_examples=200, deadline=None)
@given(samples_strategy)
def test_serialize_parse_round_trip(samples):
    assert parse_drive_test(serialize_drive_test(samples)) == samples


def test_station_config_round_trip_and_defaults():
    st_ = parse_station_config("# site\nlat = 31.2\nlon = 121.4  # comment\nfreq_hz = 1.8e9\n")
    assert st_.carrier_frequency == 1.8e9
    assert (st_.tx_power, st_.feeder_loss, st_.tx_gain, st_.rx_gain) == (38.0, 0.5, 12.0, 3.0)
    assert parse_station_config(format_station_config(st_)) == st_


@pytest.mark.parametrize("text", ["lon = 1\n", "lat = 1\nlon = 2\nbogus = 3\n", "lat = x\nlon = 2\n"])
def test_station_config_errors(text):
    with pytest.raises(InputError):
        parse_station_config(text)


def test_station_invariants():
    with pytest.raises(InputError):
        StationConfig(0.0, 0.0, carrier_frequency=0.0)
    with pytest.raises(InputError):
        StationConfig(0.0, 0.0, tx_power=float("inf"))
    assert StationConfig(0.0, 0.0).wavelength == pytest.approx(0.1153, abs=1e-4)


# -- geometry --------------------------------------------------------------------


def test_haversine_meridian_oracle(station):
    # along a meridian the great-circle distance is R * dlat exactly
    (p,) = to_polar([DriveTestSample(31.211252, 121.451055, -90.0)], station)
    expected = 6_371_000.0 * math.radians(31.211252 - 31.202252)
    assert p.distance == pytest.approx(expected, rel=1e-12)
    assert p.distance == pytest.approx(1000.754, abs=1e-3)
    assert p.angle == pytest.approx(90.0, abs=1e-9)


def test_haversine_hand_formula():
    lat1, lon1, lat2, lon2 = 31.2, 121.4, 31.25, 121.5
    p1, p2 = math.radians(lat1), math.radians(lat2)
    a = math.sin((p2 - p1) / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(math.radians(lon2 - lon1) / 2) ** 2
    expected = 2 * 6_371_000.0 * math.asin(math.sqrt(a))
    assert haversine(lat1, lon1, lat2, lon2) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("dlat, dlon, angle", [
    (0.0, 0.001, 0.0), (0.001, 0.0, 90.0), (0.0, -0.001, 180.0), (-0.001, 0.0, 270.0),
])
def test_axis_angles(station, dlat, dlon, angle):
    (p,) = to_polar([DriveTestSample(station.latitude + dlat, station.longitude + dlon, -80.0)], station)
    assert p.angle == pytest.approx(angle, abs=1e-9)
    assert 0.0 <= p.angle < 360.0


def test_angles_in_range(station):
    rng = np.random.default_rng(3)
    samples = [DriveTestSample(station.latitude + a, station.longitude + b, -80.0)
               for a, b in rng.uniform(-0.05, 0.05, (500, 2))]
    angles = np.array([p.angle for p in to_polar(samples, station)])
    assert np.all((angles >= 0) & (angles < 360))


def test_coincident_sample_rejected_with_index(station):
    samples = [DriveTestSample(31.3, 121.5, -80.0), DriveTestSample(station.latitude, station.longitude, -60.0)]
    with pytest.raises(InputError, match=r"\[1\]"):
        to_polar(samples, station)


@settings(max_examples=300, deadline=None)
@given(st.floats(-50_000, 50_000), st.floats(-50_000, 50_000))
def test_projection_round_trip(east, north):
    station = StationConfig(31.202252, 121.451055)
    lat, lon = unproject_local(east, north, station)
    e2, n2 = project_local(lat, lon, station)
    lat2, lon2 = unproject_local(e2, n2, station)
    assert abs(lat2 - lat) < 1e-6 and abs(lon2 - lon) < 1e-6
    assert abs(e2 - east) < 1e-6 and abs(n2 - north) < 1e-6


# -- smoothing -------------------------------------------------------------------


def _route(n, step, rssi):
    # samples walking east along a line 500 m north of the station
    return [PolarSample(math.degrees(math.atan2(500.0, i * step)), math.hypot(i * step, 500.0), float(p))
            for i, p in zip(range(n), rssi)]


def test_identity_window(station):
    samples = _route(20, 10.0, np.linspace(-80, -100, 20))
    out = smooth_power(samples, station)
    assert [p.rssi for p in out] == [p.rssi for p in samples]
    assert [(p.angle, p.distance) for p in out] == [(p.angle, p.distance) for p in samples]


def test_two_colocated_samples(station):
    samples = [PolarSample(10.0, 300.0, -90.0), PolarSample(10.0, 300.0, -100.0)]
    out = smooth_power(samples, station)
    assert [p.rssi for p in out] == [-95.0, -95.0]


def test_jitter_variance_reduced(station):
    rng = np.random.default_rng(0)
    rssi = -90.0 + rng.uniform(-3.0, 3.0, 2000)
    samples = _route(2000, 0.5, rssi)
    out = np.array([p.rssi for p in smooth_power(samples, station)])
    assert len(out) == len(samples)
    assert out.var() < rssi.var()


def test_idempotent_on_gapped_piecewise_constant(station):
    # levels change only across route gaps longer than the window
    width = 40 * station.wavelength
    positions, rssi = [], []
    x = 0.0
    for level in (-80.0, -95.0, -88.0):
        for _ in range(30):
            positions.append(x)
            rssi.append(level)
            x += 0.3
        x += 2 * width
    samples = [PolarSample(math.degrees(math.atan2(500.0, p)), math.hypot(p, 500.0), r) for p, r in zip(positions, rssi)]
    once = smooth_power(samples, station)
    twice = smooth_power(once, station)
    assert [p.rssi for p in twice] == [p.rssi for p in once]


@pytest.mark.parametrize("w", [0, -1])
def test_nonpositive_window(station, w):
    with pytest.raises(InputError):
        smooth_power([PolarSample(0.0, 1.0, -80.0)], station, w)


# -- estimator API ---------------------------------------------------------------


def test_polar_projector(station):
    X = np.array([[station.latitude, station.longitude + 0.01], [station.latitude + 0.01, station.longitude]])
    proj = clone(PolarProjector())
    Z = proj.fit_transform(X)
    assert Z.shape == (2, 2)
    assert Z[0, 0] == pytest.approx(0.0, abs=1e-9) and Z[1, 0] == pytest.approx(90.0, abs=1e-9)
    assert list(proj.get_feature_names_out()) == ["angle_deg", "distance_m"]
    assert proj.get_params() == {"station_lat": 31.202252, "station_lon": 121.451055}
