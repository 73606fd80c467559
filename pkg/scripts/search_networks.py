"""Exhaustive search over depth-two networks of QFT_3 blocks followed by QFT_2 blocks.

The first layer places disjoint QFT_3 blocks on consecutive modes, the second
places QFT_2 blocks on disjoint, not necessarily adjacent, mode pairs. Every
candidate is scored for the completely distinguishable target by permanents
only, so N up to 8 is feasible (N = 8 takes a few minutes).

    python scripts/search_networks.py --n 5 --show 5
"""

import argparse
import itertools
import time
from fractions import Fraction

import numpy as np

from distinguish.discriminate import success_probability_permanent
from distinguish.optics import embed, qft


def first_layers(N):
    Q3 = qft(3).matrix
    for n3 in range(0, N // 3 + 1):
        for offs in itertools.combinations(range(N - 2), n3):
            if all(b - a >= 3 for a, b in zip(offs, offs[1:])):
                U = np.eye(N, dtype=complex)
                for o in offs:
                    U = embed(Q3, o, N) @ U
                yield offs, U


def pair_sets(N):
    pairs = list(itertools.combinations(range(N), 2))
    for k in range(1, N // 2 + 1):
        for chosen in itertools.combinations(pairs, k):
            modes = [m for p in chosen for m in p]
            if len(set(modes)) == len(modes):
                yield chosen


def with_pairs(U, chosen):
    N = U.shape[0]
    Q2 = qft(2).matrix
    V = U.copy()
    for a, b in chosen:
        P = np.eye(N, dtype=complex)
        P[np.ix_([a, b], [a, b])] = Q2
        V = P @ V
    return V


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--show", type=int, default=10)
    args = ap.parse_args()
    N = args.n

    t0 = time.perf_counter()
    seen = {}
    for offs, U1 in first_layers(N):
        for chosen in [()] + list(pair_sets(N)):
            U = with_pairs(U1, chosen)
            success, _, _ = success_probability_permanent(U, "d")
            seen[(offs, chosen)] = success
    ranked = sorted(seen.items(), key=lambda kv: -kv[1])
    for (offs, chosen), success in ranked[: args.show]:
        frac = Fraction(success).limit_denominator(10**6)
        print(f"{frac!s:>12} ({success:.9f})  QFT3 at {offs}  QFT2 on {chosen}")
    print(f"{len(seen)} networks in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
