import random

import pytest

from asymhecke.cells import compute_cells, left_cell_graph
from asymhecke.coxeter import CoxeterGroup
from asymhecke.hecke import compute_kl_table

SMALL_TYPES = ["I2_3", "I2_4", "I2_5", "I2_6", "A3", "B3", "H3"]


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240611, help="seed for randomized tests")
    parser.addoption("--longrun", action="store_true", help="run full-size computations")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--longrun"):
        return
    skip = pytest.mark.skip(reason="needs --longrun")
    for item in items:
        if "longrun" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng(request):
    return random.Random(request.config.getoption("--seed"))


class Pipeline:
    """Group, KL table, cells and cell rings for one small type, built lazily."""

    def __init__(self, name):
        self.name = name
        self.group = CoxeterGroup.builtin(name)
        self.kl = compute_kl_table(self.group)
        self.left_adj = left_cell_graph(self.group, self.kl)
        self.left = compute_cells(self.group, self.kl, "left", self.left_adj)
        self.twosided = compute_cells(self.group, self.kl, "twosided", self.left_adj)
        self._rings = None

    @property
    def rings(self):
        from asymhecke.asymptotic import gamma_tensor
        if self._rings is None:
            self._rings = [gamma_tensor(self.group, self.kl, c) for c in self.left.blocks]
        return self._rings


_PIPELINES = {}


@pytest.fixture(scope="session")
def pipeline():
    def get(name):
        if name not in _PIPELINES:
            _PIPELINES[name] = Pipeline(name)
        return _PIPELINES[name]
    return get


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
