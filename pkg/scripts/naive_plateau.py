#!/usr/bin/env python3
"""Noise-floor experiment for plain-averaging SGD on the two-category
counterexample: long-run suboptimality against alpha / (2 m (2 - alpha))."""

import argparse
import sys

from indexfree.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out/naive-lb")
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    return cli_main([
        "naive-lb",
        "--alpha-grid", "0.1,0.5,1.0", "--m-grid", "2,8,32",
        "--iters", "200",
        "--trials", str(args.trials), "--seed", str(args.seed),
        "--out-dir", args.out_dir, "--check",
    ])


if __name__ == "__main__":
    sys.exit(main())
