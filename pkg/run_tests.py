#!/usr/bin/env python3
"""
Test runner for the homothetic-monge-ampere project.

Discovers tests/test_*.py and prints a summary. Pass a module name pattern
to run a subset, e.g. ``python run_tests.py theorems``.
"""

import argparse
import os
import sys
import time
import unittest

TESTS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "tests")


def run_all_tests(pattern: str = "*", verbosity: int = 2) -> int:
    """Run the matching test modules and return a process exit code."""
    print("Running Homothetic Monge-Ampere Tests")
    print("=" * 50)

    start = time.perf_counter()
    suite = unittest.TestLoader().discover(TESTS_DIR, pattern=f"test_{pattern}.py")
    result = unittest.TextTestRunner(verbosity=verbosity).run(suite)
    elapsed = time.perf_counter() - start

    print("\n" + "=" * 50)
    print("TEST SUMMARY")
    print("=" * 50)
    print(f"Tests run: {result.testsRun}")
    print(f"Failures: {len(result.failures)}")
    print(f"Errors: {len(result.errors)}")
    print(f"Skipped: {len(result.skipped)}")
    print(f"Time: {elapsed:.1f} seconds")

    if result.wasSuccessful():
        print("✅ All tests passed!")
        return 0

    print("❌ Some tests failed!")
    for title, entries in (("Failures", result.failures), ("Errors", result.errors)):
        if entries:
            print(f"\n{title}:")
            for test, _ in entries:
                print(f"  - {test}")
    return 1


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the unit tests")
    parser.add_argument(
        "pattern",
        nargs="?",
        default="*",
        help="Module pattern after test_ (default: all)",
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="Less output")
    args = parser.parse_args()
    return run_all_tests(args.pattern, 1 if args.quiet else 2)


if __name__ == "__main__":
    sys.exit(main())
