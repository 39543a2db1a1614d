#!/usr/bin/env python3
"""Q-SVRG decay experiment: trajectories, fitted per-round ratio vs the 2/3
bound, and an SVG plot, via the harness CLI."""

import argparse
import sys

from indexfree.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out/qsvrg")
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    return cli_main([
        "qsvrg",
        "--n", "8", "--dim", "10", "--L", "1.0", "--mu", "0.125",
        "--delta", "0.1", "--eps", "1e-5",
        "--trials", str(args.trials), "--seed", str(args.seed),
        "--out-dir", args.out_dir, "--check",
    ])


if __name__ == "__main__":
    sys.exit(main())
