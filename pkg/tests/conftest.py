from pathlib import Path

import pytest

from ocwc import load_csv

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def table2():
    """Eight rows, five features, class equal to f4 xor f5."""
    return load_csv(DATA_DIR / "table2.csv")


@pytest.fixture(scope="session")
def table3_upper():
    """Five rows, five features; the worked sorting-and-labels example."""
    return load_csv(DATA_DIR / "table3_upper.csv")


@pytest.fixture(scope="session")
def table2_path():
    return DATA_DIR / "table2.csv"
