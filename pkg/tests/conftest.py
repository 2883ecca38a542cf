import logging

import pytest

from warpframe import build_frameset, preset, setup


@pytest.fixture(autouse=True)
def _quiet_build_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="warpframe")


def small_config(**kw):
    """A cheap 8 kHz Gaussian configuration for exactness tests."""
    base = dict(sr=8000.0, C_cut=50.0, T_max=0.15, C_Tc=2.0)
    base.update(kw)
    return preset("gaussian", **base)


@pytest.fixture(scope="session")
def small_fs():
    return build_frameset(*setup(small_config()))


@pytest.fixture(scope="session")
def gauss_fs():
    return build_frameset(*setup(preset("gaussian")))


@pytest.fixture(scope="session")
def rcw_fs():
    return build_frameset(*setup(preset("rcw")))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
