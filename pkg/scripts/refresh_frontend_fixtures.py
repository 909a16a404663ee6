#!/usr/bin/env python3
"""Recapture the frontend test fixtures from the engine.

The vitest suites in frontend/tests assert against real engine payloads so
they stay hermetic (no Python process at test time).  Whenever engine
semantics change, rerun this from the repository root:

    python3 scripts/refresh_frontend_fixtures.py

It replays the interest-shift script through `convrec dump-tree` in both
modes and rewrites frontend/tests/fixtures/shift_turns.json.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent

sys.path.insert(0, str(REPO / "tests"))
from conftest import SHIFT_SCRIPT, write_shift_bundle  # noqa: E402


def main() -> None:
    tmp = Path(tempfile.mkdtemp())
    config = write_shift_bundle(tmp / "bundle")
    script = tmp / "script.txt"
    script.write_text("\n".join(SHIFT_SCRIPT) + "\n")

    out = {"script": SHIFT_SCRIPT}
    for mode in ("baseline", "hierarchical"):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "convrec.cli",
                "dump-tree",
                "--config",
                str(config),
                "--mode",
                mode,
                "--script",
                str(script),
            ],
            capture_output=True,
            text=True,
            check=True,
        )
        out[mode] = [json.loads(line) for line in proc.stdout.splitlines() if line.strip()]

    target = REPO / "frontend" / "tests" / "fixtures" / "shift_turns.json"
    target.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(f"wrote {target} ({len(out['baseline'])} turns per mode)")


if __name__ == "__main__":
    main()
