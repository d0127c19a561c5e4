import pytest

_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, passed, detail)`` for the end-of-run summary."""
    store = request.config.stash[_KEY]

    def record(number, title, passed, detail=""):
        # parametrized cases of one criterion share a line; all must pass
        if number in store:
            old_title, old_passed, old_detail = store[number]
            store[number] = (old_title, old_passed and bool(passed), f"{old_detail}; {title}: {detail}")
        else:
            store[number] = (title, bool(passed), detail)
        print(f"[{'PASS' if passed else 'FAIL'}] AC{number:02d} {title}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_KEY, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        title, passed, detail = store[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] AC{number:02d} {title}: {detail}")
