import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("default", deadline=None, max_examples=60)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion.

    Use as ``with criterion(3, "forest oracle"):``; the block passes when it
    finishes without raising.
    """
    import contextlib

    @contextlib.contextmanager
    def record(number: int, title: str):
        try:
            yield
        except pytest.skip.Exception as e:
            line = f"SKIP criterion {number:>2}: {title} ({e.msg})"
            _CRITERIA[number] = ("SKIP", line)
            print(line)
            raise
        except BaseException as e:
            line = f"FAIL criterion {number:>2}: {title} ({type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''})"
            _CRITERIA[number] = ("FAIL", line)
            print(line)
            raise
        line = f"PASS criterion {number:>2}: {title}"
        _CRITERIA[number] = ("PASS", line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n][1])
