"""Distribution of restart scores against the xi ladder and the restart budget.

    python scripts/optimizer_sweep.py --n 4 --target s --restarts 20 --ladders "10,13,15,17,20,25,35,50" "2,4,6,8,10"
"""

import argparse
import json
import time
from collections import Counter

from distinguish.discriminate import OptimizeConfig, make_problem, optimize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--target", default="d")
    ap.add_argument("--bad-mode", type=int, default=None)
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--ladders", nargs="+", default=[None], help="comma separated xi values; omit for the default ladder")
    ap.add_argument("--basin-hops", type=int, default=0)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()

    rows = []
    for ladder in args.ladders:
        xi = None if ladder in (None, "default") else tuple(float(x) for x in ladder.split(","))
        for seed in args.seeds:
            cfg = OptimizeConfig(restarts=args.restarts, seed=seed, xi_ladder=xi, basin_hops=args.basin_hops)
            t0 = time.perf_counter()
            r = optimize(make_problem(args.target, args.n, args.bad_mode), cfg)
            elapsed = time.perf_counter() - t0
            hist = Counter(round(s, 6) for s in r.restart_scores)
            print(f"ladder={ladder} seed={seed} best={r.success:.9f} bound={r.bound} time={elapsed:.1f}s")
            for score, count in sorted(hist.items(), reverse=True):
                print(f"    {score:.6f} x{count}")
            rows.append({"ladder": ladder, "seed": seed, "best": r.success, "scores": r.restart_scores, "seconds": elapsed})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
