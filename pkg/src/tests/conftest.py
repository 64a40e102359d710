"""
Pytest configuration file for the Lord's Paradox Laboratory tests.

This module provides shared fixtures (the weight-example model, its randomized
variant and seeded natural-unit datasets) and the ``slow`` marker for the
long Monte Carlo checks, which only run with ``--slow``.
"""

import os
import pytest

from src.scm import build_paper_scm, build_randomized_scm, simulate, to_natural_units

# Set the TESTING environment variable
os.environ["TESTING"] = "1"

TEST_SEED = 20230101


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="Run slow Monte Carlo tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo acceptance checks (run with --slow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def paper_spec():
    """The weight-example model with the published path coefficients."""
    return build_paper_scm()


@pytest.fixture(scope="session")
def randomized_spec():
    """The weight-example model with sex independent of M0 and Y0."""
    return build_randomized_scm()


@pytest.fixture(scope="session")
def paper_dataset(paper_spec):
    """10,000 natural-unit rows from the weight-example model."""
    return to_natural_units(simulate(paper_spec, 10000, TEST_SEED), paper_spec)


@pytest.fixture(scope="session")
def small_dataset(paper_spec):
    """500 natural-unit rows for quick structural checks."""
    return to_natural_units(simulate(paper_spec, 500, TEST_SEED + 1), paper_spec)


@pytest.fixture
def output_dir(tmp_path):
    """Temporary directory for artifacts written by a test."""
    directory = tmp_path / "results"
    directory.mkdir()
    return directory
