#!/usr/bin/env python3
"""Run every verification suite at a configurable trial count.

Thin wrapper over ``qdecoupling verify --suite all``; exits nonzero if
any suite reports a violation.
"""

import argparse
import sys

from qdecoupling.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    return cli_main(["verify", "--suite", "all",
                     "--trials", str(args.trials), "--seed", str(args.seed)])


if __name__ == "__main__":
    sys.exit(main())
