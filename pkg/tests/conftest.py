from pathlib import Path

import pytest

from fractal_coverage.geo_ingest import StationConfig

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def station():
    return StationConfig(latitude=31.202252, longitude=121.451055)
