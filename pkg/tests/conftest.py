from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"
CONFIGS = REPO / "configs"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS
