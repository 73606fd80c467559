"""Forced-coincidence search for three photons and a check of its best network.

Runs the constrained search (coincidence outcome required in the
discriminating set), then re-evaluates the winner through permanents and the
Fock-array oracle and compares it with the embedded balanced beamsplitter.

    python scripts/forced_coincidence.py --restarts 100
"""

import argparse
from fractions import Fraction

import numpy as np

from distinguish.discriminate import (
    OptimizeConfig,
    cost_cd_forced_coincidence,
    forced_coincidence_problem,
    optimize,
    success_probability,
    success_probability_permanent,
)
from distinguish.optics import Interferometer, embed, qft
from distinguish.scattering import named_distribution, outcome_probability_oracle


def show(name, U, problem):
    r = success_probability(U, problem)
    perm, _, _ = success_probability_permanent(U, "d")
    print(f"{name}: success {r.success:.12f} ({Fraction(r.success).limit_denominator(1000)}), permanents {perm:.12f}")
    print(f"    forced cost {cost_cd_forced_coincidence(U):.6f}  D = {[''.join(map(str, o)) for o in r.D]}")
    ref, tgt = named_distribution("i", U), named_distribution("d", U)
    for o in ref:
        print(f"    {''.join(map(str, o))}  ideal {ref[o]:.3e}  target {tgt[o]:.6f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--restarts", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--xi", type=float, default=6.0)
    ap.add_argument("--eta", type=float, default=10.0)
    args = ap.parse_args()

    problem = forced_coincidence_problem(3, xi=args.xi, eta=args.eta)
    r = optimize(problem, OptimizeConfig(restarts=args.restarts, seed=args.seed, xi_ladder=(args.xi,)))
    print(f"search: best success {r.success:.12f}, cost {r.cost:.6f}, reck {r.U.reck}")
    show("best found", r.U, problem)
    show("balanced beamsplitter on modes 0,1", Interferometer(3, embed(qft(2), 0, 3)), problem)

    coincident = (1, 1, 1)
    U = r.U.matrix
    print("oracle coincidence probability, ideal:", outcome_probability_oracle(np.ones((3, 1), dtype=int), U, coincident))
    print("oracle coincidence probability, distinguishable:", outcome_probability_oracle(np.eye(3, dtype=int), U, coincident))


if __name__ == "__main__":
    main()
