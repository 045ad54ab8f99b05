#!/usr/bin/env python3
"""
Local code quality checker: black formatting and flake8 linting over the
package, the tests and the CLI script.
"""

import subprocess
import sys
from typing import List, Tuple

PATHS = ["src/", "tests/", "homothetic_ma_cli.py", "run_tests.py", "lint.py"]

# (command, description, blocking)
CHECKS: List[Tuple[List[str], str, bool]] = [
    (["black", "--check", "--diff", *PATHS], "Code Formatting Check", True),
    (
        [
            "flake8",
            *PATHS,
            "--count",
            "--select=E9,F63,F7,F82,F401,F841",
            "--show-source",
            "--statistics",
        ],
        "Critical Linting Issues",
        True,
    ),
    (
        [
            "flake8",
            *PATHS,
            "--count",
            "--exit-zero",
            "--max-complexity=12",
            "--max-line-length=88",
            "--statistics",
        ],
        "Style Warnings",
        False,
    ),
]


def run_check(cmd: List[str], description: str) -> bool:
    """Run one tool and echo its output; True when it exits 0."""
    print(f"\n{'=' * 50}")
    print(f"🔍 {description}")
    print("=" * 50)
    try:
        result = subprocess.run(cmd, capture_output=True, text=True)
    except FileNotFoundError:
        print(f"❌ {cmd[0]} is not installed (pip install -e \".[dev]\")")
        return False
    for stream in (result.stdout, result.stderr):
        if stream:
            print(stream)
    passed = result.returncode == 0
    print(f"{'✅' if passed else '❌'} {description} - {'PASSED' if passed else 'FAILED'}")
    return passed


def main() -> int:
    print("🧹 Running Local Code Quality Checks")
    failed = [
        description
        for cmd, description, blocking in CHECKS
        if not run_check(cmd, description) and blocking
    ]
    print(f"\n{'=' * 50}")
    if not failed:
        print("🎉 All checks passed!")
        return 0
    print(f"🚨 Failed: {', '.join(failed)}")
    print(f"\nTo auto-fix formatting: black {' '.join(PATHS)}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
