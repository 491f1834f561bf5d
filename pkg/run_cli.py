#!/usr/bin/env python3
"""
bfdesign - Bayes factor power and sample size calculations

Computes Bayes factors, power and sample sizes for planned Bayes factor
analyses.  Run with a subcommand, e.g. ``python run_cli.py presets``.
"""

import atexit
import os
import signal
import sys
from dotenv import load_dotenv

load_dotenv()


def check_environment():
    """Check that optional environment variables hold usable values"""
    problems = []

    workers = os.environ.get("BFDESIGN_WORKERS")
    if workers is not None and not (workers.isdigit() and int(workers) > 0):
        problems.append(f"BFDESIGN_WORKERS must be a positive integer, got {workers!r}")

    level = os.environ.get("BFDESIGN_LOG_LEVEL")
    if level is not None and level.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
        problems.append(f"BFDESIGN_LOG_LEVEL must be a logging level name, got {level!r}")

    config = os.environ.get("BFDESIGN_CONFIG")
    if config and not os.path.isfile(config):
        problems.append(f"BFDESIGN_CONFIG points to a missing file: {config}")

    if problems:
        print("❌ Error: Invalid environment variables:", file=sys.stderr)
        for problem in problems:
            print(f"   - {problem}", file=sys.stderr)
        print("\nPlease fix these in your .env file", file=sys.stderr)
        return False

    return True


def cleanup():
    """Stop the worker pool on exit"""
    try:
        from src.parallel import shutdown_executor
        shutdown_executor()
    except Exception:
        pass


def main():
    """Main entry point for the CLI"""
    if not check_environment():
        sys.exit(2)

    # Register cleanup handlers
    atexit.register(cleanup)
    signal.signal(signal.SIGTERM, lambda *_: sys.exit(1))

    from src.cli.app import run

    try:
        sys.exit(run(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n\n⚡️ Stopped by user", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
