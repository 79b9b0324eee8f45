"""Adjacent-site negativity relative to 2|g| near criticality.

Shows how far below |g| ~ 1/N^2 one has to go before the small-g form
E ~ 2|g| holds at a given ring size.
"""

import argparse

import numpy as np

from mpchain import ModelParams, finite_negativity


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=40)
    args = ap.parse_args()
    N = args.n
    print(f"{'g':>10} {'sigma':>5} {'E/(2|g|)':>12} {'1-(N-2)|g|':>12}")
    for g in np.logspace(-6, -2, 9):
        for s in (1, -1):
            ratio = finite_negativity(ModelParams(g, s), 2, N) / (2 * g)
            print(f"{g:10.3e} {s:5d} {ratio:12.6f} {1 - (N - 2) * g:12.6f}")


if __name__ == "__main__":
    main()
