import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

sys.path.insert(0, str(Path(__file__).parent))  # tests/lots.py

from valetplan.config import load_config  # noqa: E402
from valetplan.pipeline import RunStore  # noqa: E402

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def cfg15():
    return load_config(CONFIGS / "15x12.yaml")


@pytest.fixture(scope="session")
def run_root(tmp_path_factory):
    """Run directory shared by tests that only read 15x12 artifacts."""
    return tmp_path_factory.mktemp("runs")


@pytest.fixture(scope="session")
def sol15(cfg15, run_root):
    """Solution 1 for 15x12, computed once with one worker and stored under ``run_root``."""
    return RunStore(cfg15, run_root).solution1(workers=1)


@pytest.fixture(scope="session")
def layout2(sol15):
    return sol15.layout(2)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line; the lines are repeated in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number: int, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
