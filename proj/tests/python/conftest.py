import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture
def config_dir():
    return pathlib.Path(os.environ.get("KINEX_CONFIG_DIR", ROOT / "configs"))


@pytest.fixture
def data_dir():
    return ROOT / "tests" / "data"
