#!/usr/bin/env python3
"""Randomized cross-solver self-check: solves random systems with every
solver, certifies each solution, and reports any counterexamples found.
Thin wrapper over `python -m wsprox.cli selftest`.

Usage: python scripts/run_selftest.py
"""

import sys

from wsprox.cli import main

if __name__ == "__main__":
    sys.exit(main(["selftest", *sys.argv[1:]]))
