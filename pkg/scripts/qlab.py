#!/usr/bin/env python3
# /// script
# requires-python = ">=3.11"
# dependencies = ["numpy>=2.0", "lark>=1.2", "pydantic>=2.0", "pyyaml>=6.0"]
# ///
"""
qlab command-line wrapper.

Runs the CLI in src/cli.py without installing the package.

Usage:
    uv run scripts/qlab.py catalog
    uv run scripts/qlab.py check-algebra godel3 --format json
    uv run scripts/qlab.py hierarchy chain2 --levels 2
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
