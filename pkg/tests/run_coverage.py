#!/usr/bin/env python3
"""
Run test coverage analysis for the horokit package.
Requires coverage.py: pip install coverage
"""

import sys
import os
import subprocess
import argparse


# ANSI color codes (using standard colors, not bright)
class Colors:
    GREEN = '\033[32m'
    RED = '\033[31m'
    YELLOW = '\033[33m'
    CYAN = '\033[36m'
    BOLD = '\033[1m'
    END = '\033[0m'
    # Disable colors if output is redirected or in non-TTY
    if not sys.stdout.isatty():
        GREEN = RED = YELLOW = CYAN = BOLD = END = ''


# Modules reachable from the CLI; reported even when no test imports them
TRACKED_MODULES = [
    'horokit/numerics.py',
    'horokit/spectra.py',
    'horokit/geometry.py',
    'horokit/transforms.py',
    'horokit/hardy.py',
    'horokit/tube_hardy.py',
    'horokit/config.py',
    'horokit/report.py',
    'horokit/suites.py',
    'horokit/cli.py',
]


def check_coverage_installed():
    """Check if coverage.py is installed."""
    try:
        import coverage  # noqa: F401
        return True
    except ImportError:
        return False


def colorize(line):
    if '... ok' in line or line.startswith('OK'):
        return f"{Colors.GREEN}{line}{Colors.END}"
    if 'FAIL' in line or 'ERROR' in line:
        return f"{Colors.RED}{line}{Colors.END}"
    if 'skipped' in line:
        return f"{Colors.YELLOW}{line}{Colors.END}"
    if line.startswith('Ran '):
        return f"{Colors.CYAN}{line}{Colors.END}"
    return line


def run_coverage(html=False, verbose=False, show_missing=False, slow=False):
    """Run the unit tests under coverage and print the report."""
    if not check_coverage_installed():
        print(f"{Colors.RED}❌ coverage.py is not installed.{Colors.END}")
        print("\nPlease install it with:")
        print(f"  {Colors.CYAN}pip install -r requirements.txt{Colors.END}")
        return 1

    project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    tests_dir = os.path.join(project_root, 'tests')

    print("=" * 80)
    print("TEST COVERAGE ANALYSIS")
    print("=" * 80)
    for module in TRACKED_MODULES:
        marker = '✓' if os.path.exists(os.path.join(project_root, module)) else '⚠'
        print(f"  {marker} {module}")
    print()

    env = dict(os.environ)
    if slow:
        env['HOROKIT_SLOW_TESTS'] = '1'
    coverage_cmd = [
        sys.executable, '-m', 'coverage', 'run',
        '--source', os.path.join(project_root, 'horokit'),
        '-m', 'unittest', 'discover', '-s', tests_dir, '-p', 'test_*.py', '-v'
    ]
    if verbose:
        print(f"Command: {' '.join(coverage_cmd)}")

    result = subprocess.run(coverage_cmd, cwd=project_root, env=env,
                            stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
    for line in result.stdout.split('\n'):
        if verbose or '...' in line or line.startswith(('Ran ', 'OK', 'FAILED')):
            print(colorize(line))

    if result.returncode != 0:
        print(f"\n{Colors.RED}❌ Tests failed with exit code {result.returncode}{Colors.END}")
        return result.returncode

    print()
    print("=" * 80)
    print("COVERAGE REPORT")
    print("=" * 80)
    report_cmd = [sys.executable, '-m', 'coverage', 'report']
    if show_missing:
        report_cmd.append('--show-missing')
    subprocess.run(report_cmd, cwd=project_root)

    if html:
        subprocess.run([sys.executable, '-m', 'coverage', 'html'], cwd=project_root)
        print(f"\nHTML report: {Colors.CYAN}{os.path.join(project_root, 'htmlcov', 'index.html')}{Colors.END}")
    return 0


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(
        description='Run test coverage analysis',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 tests/run_coverage.py
  python3 tests/run_coverage.py --html --show-missing
  python3 tests/run_coverage.py --slow
        """
    )
    parser.add_argument('--html', action='store_true', help='Generate HTML coverage report')
    parser.add_argument('--show-missing', action='store_true', help='Show missing line numbers in report')
    parser.add_argument('-v', '--verbose', action='store_true', help='Verbose output')
    parser.add_argument('--slow', action='store_true', help='Include tests gated by HOROKIT_SLOW_TESTS')
    args = parser.parse_args()

    sys.exit(run_coverage(html=args.html, verbose=args.verbose, show_missing=args.show_missing, slow=args.slow))


if __name__ == '__main__':
    main()
