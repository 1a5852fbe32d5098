import numpy as np
import pytest

from doseforge.inference import McmcConfig


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running MCMC runs")


@pytest.fixture
def quick_mcmc():
    """Short chains for plumbing tests; not for numerical claims."""
    return McmcConfig(chains=2, warmup=300, post_warmup=300, thin=3, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion lines recorded by test_acceptance, echoed after the run
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
