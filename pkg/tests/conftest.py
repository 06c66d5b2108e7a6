import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from acceptance import VERDICTS  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(VERDICTS):
        name, ok, detail = VERDICTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}")
