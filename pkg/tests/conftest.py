import pytest

from paraground.frontend import parse_program
from helpers import CORPUS


@pytest.fixture
def load():
    def _load(name: str):
        return parse_program((CORPUS / name).read_text())

    return _load


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
