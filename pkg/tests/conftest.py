import pytest

_CRITERIA = {}


@pytest.fixture
def record_criterion():
    """Store the outcome of one acceptance criterion and print its status line.

    The returned callable takes the criterion number, a short title and a list
    of ``(description, passed)`` checks, and returns the descriptions of the
    failed checks.
    """

    def record(number, title, checks):
        failed = [desc for desc, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number:>2} {status}  {title}"
        if failed:
            line += "  [failed: " + "; ".join(failed) + "]"
        _CRITERIA[number] = line
        print(line)
        return failed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
