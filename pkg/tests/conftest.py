"""Shared fixtures."""

import pytest

from split_cg.diagnostics import interval_example
from split_cg.sets import Box, ProductConstraint
from split_cg.space import Weights


@pytest.fixture
def interval():
    """(objective, product constraint) of x^2/2 over {1} and [-2, 2]."""
    return interval_example(1.0)


@pytest.fixture
def two_boxes():
    return ProductConstraint([Box([-1.0, -1.0], [1.0, 1.0]), Box([0.0, 0.0], [2.0, 2.0])], Weights([0.3, 0.7]))


@pytest.fixture(autouse=True)
def no_output_dir_env(monkeypatch):
    monkeypatch.delenv('SPLIT_CG_OUTPUT_DIR', raising=False)
