import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Record a criterion verdict, print it, then assert it."""
    lines = request.config.stash[_LINES]

    def record(number: int, title: str, residual: float, tol: float) -> None:
        ok = bool(residual < tol)
        line = (f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: "
                f"max residual {residual:.2e} (tolerance {tol:.0e})")
        lines.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_LINES]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
