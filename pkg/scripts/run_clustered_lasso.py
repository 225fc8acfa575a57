#!/usr/bin/env python3
"""Clustered-lasso demo: sweeps the weight-sharing strength on synthetic
grouped regression data and compares proximal training against a plain
subgradient baseline. Thin wrapper over `python -m wsprox.cli demo`.

Usage: python scripts/run_clustered_lasso.py [--d 50] [--k 5] [--n 200]
           [--alpha-sweep 0.1,0.5,1.0,2.0,5.0] [--rho 0.9] [--output report.json]
"""

import sys

from wsprox.cli import main

if __name__ == "__main__":
    sys.exit(main(["demo", "clustered-lasso", *sys.argv[1:]]))
