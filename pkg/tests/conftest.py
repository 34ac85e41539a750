import itertools

import pytest


def all_sequences(max_len, values):
    for length in range(max_len + 1):
        yield from itertools.product(values, repeat=length)


@pytest.fixture
def small_sequences():
    return list(all_sequences(6, (-3, -1, 0, 2, 3)))


_CRITERIA = []


def record_criterion(line):
    _CRITERIA.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
