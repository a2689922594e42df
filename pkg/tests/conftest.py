import json
import warnings
from pathlib import Path

import pytest

from displacemon.device import build_devices

ROOT = Path(__file__).resolve().parents[1]
DEVICES_JSON = ROOT / "configs" / "devices.json"


@pytest.fixture(scope="session")
def config_doc():
    return json.loads(DEVICES_JSON.read_text())


@pytest.fixture(scope="session")
def devices(config_doc):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return {d.name: d for d in build_devices(config_doc)}


@pytest.fixture(scope="session")
def dev_a(devices):
    return devices["A"]


@pytest.fixture(scope="session")
def dev_b(devices):
    return devices["B"]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1][1:])):
            terminalreporter.write_line(line)
