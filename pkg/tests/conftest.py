import pytest

ACCEPTANCE_LINES = []


@pytest.fixture(autouse=True)
def _collect_acceptance(request, capsys):
    yield
    if request.module.__name__.endswith("test_acceptance"):
        out = capsys.readouterr().out
        ACCEPTANCE_LINES.extend(ln for ln in out.splitlines() if ln.startswith(("PASS", "FAIL")))
        print(out, end="")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(ln)
