import os

import numpy as np
import pytest

from netrank import Logistic, generate_er_network, simulate


def pytest_collection_modifyitems(config, items):
    if os.environ.get("NETRANK_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="slow tier; set NETRANK_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def small_panel():
    adj = generate_er_network(8, 0.2, seed=3)
    return adj, simulate(adj, Logistic(), 0.4, 300, seed=3)


def quadratic_dataset(seed, n=500, noise=0.1):
    """``y = x1^2 + x2 + 2`` plus an irrelevant ``x3``; inputs uniform on [0, 10]."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 10.0, size=(n, 3))
    y = X[:, 0] ** 2 + X[:, 1] + 2.0 + rng.normal(0.0, noise, size=n)
    return X, y


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
