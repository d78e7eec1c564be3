import pytest

_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def criterion_log(request):
    """Collects acceptance verdict lines for the end-of-run summary."""
    return request.config.stash[_CRITERIA]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
