import pytest

from heightforge.field import NumberField, rational_field

# defining polynomials, low degree first
CORPUS = {
    "Q": [0, 1],
    "Q(i)": [1, 0, 1],
    "Q(sqrt2)": [-2, 0, 1],
    "Q(sqrt5)": [-1, -1, 1],
    "cubic": [-1, -1, 0, 1],
    "lehmer": [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1],
}

LEHMER = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]


@pytest.fixture(scope="session")
def fields():
    return {name: (rational_field() if name == "Q" else NumberField(f)) for name, f in CORPUS.items()}


@pytest.fixture(scope="session")
def Q():
    return rational_field()


# one PASS/FAIL line per acceptance criterion, printed after the run

_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    if rep.when == "setup" and rep.passed:
        return
    _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict, seconds = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {title}  ({seconds:.2f} s)")
