"""Tabulate the resolvent error against the exact forest matrix as alpha grows; the product alpha*error levels off."""

import argparse
from pathlib import Path

import numpy as np

from forest_consensus import forest_matrix, laplacian, read_digraph

DEFAULT_INPUT = Path(__file__).resolve().parent.parent / "data" / "seven_agents.dg"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", default=str(DEFAULT_INPUT))
    ap.add_argument("--max-exponent", type=int, default=8)
    args = ap.parse_args()

    g = read_digraph(args.input)
    Lf = laplacian(g).as_float()
    J = forest_matrix(g).as_float()
    print("alpha,max_error,alpha_times_error")
    for e in range(0, args.max_exponent + 1):
        alpha = 10.0**e
        err = float(np.max(np.abs(np.linalg.inv(np.eye(g.n) + alpha * Lf) - J)))
        print(f"{alpha:.0e},{err:.3e},{alpha * err:.4f}")


if __name__ == "__main__":
    main()
