import pytest

from collimator.rng import make_rng


class ScriptedRng:
    """Stand-in generator whose ``integers`` calls return scripted values."""

    def __init__(self, values):
        self.values = list(values)

    def integers(self, bound):
        value = self.values.pop(0)
        assert 0 <= value < bound
        return value


@pytest.fixture
def rng():
    return make_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one verdict line per criterion; all lines are printed at the end."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        verdict = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{verdict}] criterion {number}: {title} -- {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
