import pytest

_VERDICTS: dict[int, str] = {}


class Verdicts:
    """Collects one line per acceptance criterion for the terminal summary."""

    def record(self, number: int, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  {detail}"
        _VERDICTS[number] = line
        print(line)


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[k])
