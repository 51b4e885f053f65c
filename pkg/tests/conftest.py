import json
from pathlib import Path

import pytest

from moglib.begled import BegledParams
from moglib.egled import EgledParams

ORACLES = json.loads((Path(__file__).parent / "oracles" / "values.json").read_text())

T9 = BegledParams(1.5, 0.5, 0.7, 0.8, 1.2, 1.3)


@pytest.fixture
def oracle():
    return ORACLES


@pytest.fixture
def t9():
    return T9


@pytest.fixture
def unit_exp():
    return EgledParams(1.0, 1.0, 0.0, 1.0)
