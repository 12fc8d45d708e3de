import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger jit compilation outside any timed section
    from bubbletower import Partition, TowerConfig, ansatz_state
    from bubbletower.solver import assemble_residual

    cfg = TowerConfig(
        outer=1.0,
        eps=1e-3,
        partition=Partition.alternating(1, 1),
        beta=-1.0,
        mu=(1.0,),
        d=(1.0,),
    )
    assemble_residual(ansatz_state(cfg, points_per_decade=16))


@pytest.fixture
def acceptance_line():
    def record(text: str) -> None:
        ACCEPTANCE_LINES.append(text)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
