#!/usr/bin/env python3
"""
Run all tests in the tests directory.

    python3 tests/run_tests.py                 # fast tests
    python3 tests/run_tests.py --slow          # include table-based transform tests
    python3 tests/run_tests.py --slowest 10    # print the ten slowest tests
"""

import sys
import os
import argparse
import time
import unittest

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


class TimingTestResult(unittest.TextTestResult):
    """Test result that records the wall time of every test."""

    def __init__(self, stream, descriptions, verbosity):
        super().__init__(stream, descriptions, verbosity)
        self.test_timings = []
        self._started = {}

    def startTest(self, test):
        self._started[test] = time.time()
        super().startTest(test)

    def _finish(self, test, status):
        duration = time.time() - self._started.pop(test, time.time())
        self.test_timings.append({'test': str(test), 'duration': duration, 'status': status})

    def addSuccess(self, test):
        self._finish(test, 'ok')
        super().addSuccess(test)

    def addError(self, test, err):
        self._finish(test, 'ERROR')
        super().addError(test, err)

    def addFailure(self, test, err):
        self._finish(test, 'FAIL')
        super().addFailure(test, err)

    def addSkip(self, test, reason):
        self._finish(test, 'skipped')
        super().addSkip(test, reason)


def print_slowest(timings, top_n):
    print()
    print("=" * 80)
    print(f"Top {top_n} slowest tests (out of {len(timings)} total)")
    print("=" * 80)
    for rank, info in enumerate(sorted(timings, key=lambda t: t['duration'], reverse=True)[:top_n], 1):
        print(f"{rank:<6} {info['duration']:>9.3f}s  {info['status']:<8} {info['test'][:60]}")


def discover_and_run_tests(pattern='test_*.py', slow=False, slowest=0):
    """Discover and run all tests in the tests directory."""
    if slow:
        os.environ['HOROKIT_SLOW_TESTS'] = '1'
    test_dir = os.path.dirname(os.path.abspath(__file__))

    loader = unittest.TestLoader()
    suite = loader.discover(start_dir=test_dir, pattern=pattern)

    runner = unittest.TextTestRunner(verbosity=2, resultclass=TimingTestResult)
    result = runner.run(suite)
    if slowest:
        print_slowest(result.test_timings, slowest)

    # Return exit code (0 for success, 1 for failure)
    return 0 if result.wasSuccessful() else 1


def main():
    parser = argparse.ArgumentParser(description='Run the horokit test suite')
    parser.add_argument('--pattern', default='test_*.py', help='Test file pattern (default: test_*.py)')
    parser.add_argument('--slow', action='store_true', help='Also run tests gated by HOROKIT_SLOW_TESTS')
    parser.add_argument('--slowest', type=int, default=0, metavar='N', help='Print the N slowest tests')
    args = parser.parse_args()
    return discover_and_run_tests(args.pattern, args.slow, args.slowest)


if __name__ == '__main__':
    sys.exit(main())
