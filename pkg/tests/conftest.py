import pytest

_LINES_KEY = pytest.StashKey[list]()


class Criterion:
    def __init__(self, name, lines):
        self.name = name
        self.lines = lines
        self.reported = False

    def report(self, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} {self.name}: {detail}"
        print(line)
        self.lines.append(line)
        self.reported = True
        return passed


@pytest.fixture
def criterion(request):
    lines = request.config.stash.setdefault(_LINES_KEY, [])
    crit = Criterion(request.node.name, lines)
    yield crit
    if not crit.reported:
        lines.append(f"FAIL {crit.name}: raised before reporting")


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
