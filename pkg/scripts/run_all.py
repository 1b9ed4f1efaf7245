#!/usr/bin/env python3
"""Run the whole verification suite with default settings.

Equivalent to ``qwitness all``; extra arguments are forwarded, e.g.
``python scripts/run_all.py --seed 11 --out results/``.
"""

import sys

from qwitness.cli import main

if __name__ == "__main__":
    sys.exit(main(["all", *sys.argv[1:]]))
