import pytest

from gsmap import _backend

ACCEPTANCE_RESULTS = []


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run long-running checks (MNIST subsample)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="slow; enable with --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
            criterion = item.get_closest_marker("criterion")
            if criterion is not None:
                ACCEPTANCE_RESULTS.append((criterion.args[0], "SKIP", "slow; enable with --run-slow"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"{status}  {name}: {detail}")


@pytest.fixture
def acceptance():
    """Record one pass/fail line for the terminal summary, then assert."""

    def record(name, ok, detail=""):
        ACCEPTANCE_RESULTS.append((name, "PASS" if ok else "FAIL", detail))
        assert ok, f"{name}: {detail}"

    def skip(name, reason):
        ACCEPTANCE_RESULTS.append((name, "SKIP", reason))
        pytest.skip(reason)

    record.skip = skip
    return record


BACKENDS = ["python"] + (["compiled"] if _backend.COMPILED_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param
