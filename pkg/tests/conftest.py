import pytest

from aerosim.mobility import Position
from aerosim.radio import RadioConfig, SnrPerTable
from aerosim.scenario import ScenarioConfig
from aerosim.tracegen import OcaRegion


@pytest.fixture
def gs():
    return Position(0.0, 0.0, 0.0001)


@pytest.fixture
def oca(gs):
    return OcaRegion(gs, 370.4)


@pytest.fixture
def evaluation():
    return ScenarioConfig()


def flat_table(per):
    return SnrPerTable([(-50.0, per, 0.0), (50.0, per, 0.0)])


@pytest.fixture
def lossless_radio():
    return RadioConfig(400.0, flat_table(0.0))


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    number, title = request.node.get_closest_marker("criterion").args
    ACCEPTANCE[number] = (title, "FAIL", "")

    def detail(text):
        ACCEPTANCE[number] = (title, ACCEPTANCE[number][1], text)

    yield detail
    if request.node.rep_call_passed:
        ACCEPTANCE[number] = (title, "PASS", ACCEPTANCE[number][2])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call_passed = rep.passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, status, detail = ACCEPTANCE[number]
        line = f"[{status}] {number}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
