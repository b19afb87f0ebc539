# test/conftest.py

import os

# Settings are read at import time, so the environment goes first
os.environ["ENV"] = "testing"
os.environ.pop("LOG_LEVEL", None)

import pytest  # noqa: E402

from padicla.config import RunConfig  # noqa: E402
from padicla.modules import PadicModule, SeriesModule  # noqa: E402
from padicla.series import PerfLaurent  # noqa: E402


@pytest.fixture
def padic3():
    """Z_3 at precision 60 with the trivial action."""
    return PadicModule(3)


@pytest.fixture
def series3():
    """Perfect Laurent series over F_3 at a small cap."""
    return SeriesModule(3, 12)


@pytest.fixture
def X3():
    return PerfLaurent.X(3)


@pytest.fixture
def X2():
    return PerfLaurent.X(2)


@pytest.fixture
def small_config():
    """A RunConfig small enough for experiments to finish quickly."""
    return RunConfig(prime=3, cap=8, degree=8, samples=1, levels=[0, 1], witt_length=1)


@pytest.fixture
def config_file(tmp_path):
    """A key-value config file overriding the prime and the cap."""
    path = tmp_path / "run.cfg"
    path.write_text("# desk run\nprime = 2\ncap = 10\nlambda-grid = 1, 0, -1\n", encoding="utf-8")
    return path
