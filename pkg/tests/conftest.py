import pytest

from extremescore import _backend
from extremescore.distributions import draw_model, m1, make_distribution


@pytest.fixture
def win_loss():
    return m1()


@pytest.fixture
def half_draw():
    return draw_model("1/2")


@pytest.fixture
def float_dist():
    """Non-dyadic, inexact distribution (exercises the double-inversion sampler)."""
    return make_distribution(4, [(0, 0.3), (1, 0.1), (2, 0.2), (3, 0.1), (4, 0.3)])


BUNDLED = [pytest.param(m1(), id="m1"), pytest.param(draw_model("1/2"), id="draw-half")]
BACKENDS = sorted(_backend.available())


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
