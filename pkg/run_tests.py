#!/usr/bin/env python3
"""
AFCM test runner
Selects the unit, integration or desk-scale acceptance suites and forwards to pytest
"""

import argparse
import importlib.util
import subprocess
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).parent
PYTEST_INI = PROJECT_ROOT / "src" / "tests" / "pytest.ini"

# suite -> (test paths, marker expression)
SUITES = {
    "unit": (["src/tests/unit"], "not slow"),
    "integration": (["src/tests/integration"], "not slow"),
    "slow": (["src/tests/integration"], "slow"),
    "all": (["src/tests/unit", "src/tests/integration"], "slow or not slow"),
}

REQUIRED_MODULES = ["numpy", "scipy", "pandas", "pydantic", "pytest", "pytest_cov"]


def missing_modules():
    """Import names of the required packages that cannot be found."""
    return [name for name in REQUIRED_MODULES if importlib.util.find_spec(name) is None]


def build_command(suite, verbose=True, coverage=False, keyword=None, exitfirst=False):
    """
    pytest command line for a suite

    Args:
        suite (str): One of SUITES
        verbose (bool): Verbose pytest output
        coverage (bool): Coverage over the rfm and app packages
        keyword (str): Optional -k expression
        exitfirst (bool): Stop at the first failure
    """
    paths, markers = SUITES[suite]
    cmd = [sys.executable, "-m", "pytest", "-c", str(PYTEST_INI), "--rootdir", "src/tests", "-m", markers]
    cmd.append("-v" if verbose else "-q")
    if keyword:
        cmd.extend(["-k", keyword])
    if exitfirst:
        cmd.append("-x")
    if coverage:
        cmd.extend(["--cov=rfm", "--cov=app", "--cov-report=term-missing", "--cov-report=html"])
    return cmd + paths


def main():
    parser = argparse.ArgumentParser(description="Run the AFCM test suites")
    parser.add_argument("--type", choices=sorted(SUITES), default="unit",
                        help="Suite to run (default: unit; 'slow' runs the desk-scale acceptance runs)")
    parser.add_argument("-k", "--keyword", default=None, help="Only run tests matching this expression")
    parser.add_argument("-x", "--exitfirst", action="store_true", help="Stop at the first failure")
    parser.add_argument("--no-verbose", action="store_true", help="Quiet pytest output")
    parser.add_argument("--coverage", action="store_true", help="Generate a coverage report")
    parser.add_argument("--check-deps", action="store_true", help="Only check that dependencies are installed")
    args = parser.parse_args()

    missing = missing_modules()
    if missing:
        print("Missing required packages: " + ", ".join(m.replace("_", "-") for m in missing))
        print("Install them with: pip install -r requirements.txt")
        sys.exit(1)
    if args.check_deps:
        print("All test dependencies are installed")
        sys.exit(0)

    cmd = build_command(args.type, verbose=not args.no_verbose, coverage=args.coverage,
                        keyword=args.keyword, exitfirst=args.exitfirst)
    print(f"Running {args.type} tests")
    print(" ".join(cmd))
    try:
        code = subprocess.run(cmd, cwd=PROJECT_ROOT, check=False).returncode
    except KeyboardInterrupt:
        print("\nInterrupted")
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    main()
