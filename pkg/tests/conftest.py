import numpy as np
import pytest

from quantbounds import ClipSpec, LabeledSeries, SwitchedModel
from quantbounds.experiments import SWITCHED_PARAMS, ExperimentConfig, run_table2, simulate_from_config, fit_from_config


@pytest.fixture(scope="session")
def bench_switched():
    return SwitchedModel(tuple(SWITCHED_PARAMS), (2, 2))


@pytest.fixture
def clip3():
    return ClipSpec(3.0)


def series_from_losses(losses, r=3.0):
    """Series whose squared loss under the zero predictor equals ``losses``."""
    y = np.sqrt(np.asarray(losses, dtype=float))
    return LabeledSeries(np.zeros((len(y), 1)), y, ClipSpec(r))


@pytest.fixture(scope="session")
def table1_data():
    cfg = ExperimentConfig.from_dict({"experiment": "table1"})
    series, _ = simulate_from_config(cfg)
    fit = fit_from_config(cfg, series)
    return cfg, series, fit


@pytest.fixture(scope="session")
def table2_run():
    cfg = ExperimentConfig.from_dict({"experiment": "table2"})
    return cfg, run_table2(cfg)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
