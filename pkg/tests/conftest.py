import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", help="run the long completeness search")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.environ.get("KSTAR_RUN_SLOW"):
        return
    skip = pytest.mark.skip(reason="slow tier: use --runslow or KSTAR_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def classification():
    from kstar_fano.cli import _classification

    return _classification()


@pytest.fixture(scope="session")
def records(classification):
    return classification[0]


@pytest.fixture(scope="session")
def by_list_id(records):
    from kstar_fano.cli import load_lists

    fams = {str(r.input): r for r in records}
    return {e["id"]: fams[e["family"]] for e in load_lists()}


ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {status} - {detail}")
