from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pda_forge.nhslr import Nhslr  # noqa: E402
from pda_forge.pda import Pda  # noqa: E402

GOLDEN_PDA_ROWS = [
    ["*", "*", 1, 4],
    [1, "*", "*", 2],
    [3, 2, "*", "*"],
    ["*", 4, 3, "*"],
]

NHSLR_7_3_4_ROWS = [[1, 2, 3, 4], [2, 1, 4, 6], [4, 5, 2, 1]]

AXB_M33_V17_ROWS = [
    [12, 8, 4, 11, 7, 3, 10, 6, 2],
    [3, 7, 11, 2, 6, 10, 1, 5, 9],
    [14, 10, 6, 15, 11, 7, 16, 12, 8],
    [5, 9, 13, 6, 10, 14, 7, 11, 15],
]


@pytest.fixture
def golden_pda() -> Pda:
    return Pda.from_rows(GOLDEN_PDA_ROWS, Z=2, S=4)


@pytest.fixture
def golden_pda_mutated() -> Pda:
    return Pda.from_rows(GOLDEN_PDA_ROWS, Z=2, S=4).with_cell(0, 0, 2)


@pytest.fixture
def nhslr_7_3_4() -> Nhslr:
    return Nhslr.from_integers(7, NHSLR_7_3_4_ROWS)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        r = RESULTS[n]
        status = "PASS" if r["ok"] else "FAIL"
        line = f"criterion {n:>2}: {status}  {r['elapsed'] * 1000:9.3f} ms (budget {r['budget'] * 1000:g} ms)  {r['title']}"
        if r.get("note"):
            line += f"  [{r['note']}]"
        terminalreporter.write_line(line)
