import pytest

from causalnets import fixtures


@pytest.fixture(scope="session")
def fig1():
    return fixtures.load("fig1")


@pytest.fixture(scope="session")
def fig2():
    return fixtures.load("fig2")


@pytest.fixture(scope="session")
def fig4():
    return fixtures.load("fig4")


@pytest.fixture(scope="session")
def fig5():
    return fixtures.load("fig5")


@pytest.fixture(scope="session")
def remark():
    return fixtures.load("remark")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
