"""Run the seven acceptance criteria outside pytest and print one line each."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from test_acceptance import CRITERIA, RESULTS, _record  # noqa: E402


def main() -> int:
    failed = 0
    for number, name, fn in CRITERIA:
        out = _record(number, name, fn())
        print(RESULTS[-1], flush=True)
        failed += not out.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
