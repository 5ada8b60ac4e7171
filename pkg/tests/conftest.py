from pathlib import Path

import pytest

from ucsc.dataset import BREAST_CANCER_SCHEMA, IRIS_SCHEMA, load_delimited

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def iris():
    return load_delimited(DATA_DIR / "iris.data", IRIS_SCHEMA)


@pytest.fixture(scope="session")
def breast_cancer():
    return load_delimited(DATA_DIR / "breast-cancer-wisconsin.data", BREAST_CANCER_SCHEMA)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
