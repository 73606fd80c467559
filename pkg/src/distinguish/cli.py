"""Command-line entry point: ``distinguish <subcommand> ...``.

Exit status is 0 on success, 1 when a computation fails or a reproduced
value does not match, and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .combinatorics import enumerate_partitions, sym_dim, unitary_dim
from .discriminate import (
    DiscriminationProblem,
    OptimizeConfig,
    bound_general,
    forced_coincidence_problem,
    make_problem,
    optimize,
)
from .errors import DistinguishError
from .optics import Interferometer, ReckParams, constant_depth_network, from_reck, load_interferometer, qft
from .reproduce import table1, table2
from .scattering import outcome_probabilities
from .schur_weyl import CACHE_ENV_VAR, build_transform, load_cache, save_cache, verify_transform
from .states import named_state, rho_from_fock_array


class UsageError(Exception):
    pass


def _state(text: str, n: int | None, bad_mode: int | None, T=None):
    if text.startswith("fock:"):
        A = np.array(json.loads(Path(text[5:]).read_text()), dtype=int)
        return rho_from_fock_array(A, T), A
    if text not in {"i", "s", "d", "sm"}:
        raise UsageError(f"unknown target '{text}'")
    if n is None:
        raise UsageError("--n is required for named targets")
    if bad_mode is not None and not 1 <= bad_mode <= n:
        raise UsageError(f"--bad-mode must lie in 1..{n}")
    return named_state(text, n, bad_mode), None


def _network(text: str, d: int) -> Interferometer:
    if text == "qft":
        return qft(d)
    if text in {"table1", "constant_depth"}:
        return constant_depth_network(d)
    if text.startswith("reck:"):
        data = json.loads(Path(text[5:]).read_text())
        return from_reck(ReckParams(data["thetas"], data["omegas"]), d)
    if text.startswith("file:"):
        return load_interferometer(text[5:])
    raise UsageError(f"unknown network '{text}'")


def _label(lam) -> str:
    return "(" + ",".join(map(str, lam)) + ")"


def cmd_cache_build(args) -> int:
    T = build_transform(args.n, args.d)
    report = verify_transform(T, trials=5, seed=args.seed)
    path = save_cache(T, args.cache_dir)
    print(f"N={args.n} d={args.d}: {len(T.labels)} basis states, written to {path}")
    print("irrep,unitary_dim,sym_dim")
    for lam in enumerate_partitions(args.n, args.d):
        print(f"{_label(lam)},{unitary_dim(lam, args.d)},{sym_dim(lam)}")
    print(f"max deviation {report.max_deviation:.3e}")
    return 0 if report.ok() else 1


def cmd_cache_verify(args) -> int:
    T = load_cache(args.n, args.d, args.cache_dir)
    report = verify_transform(T, trials=args.trials, seed=args.seed)
    print(
        f"unitarity {report.unitarity:.3e}  weight leak {report.weight_leak:.3e}  "
        f"off-block {report.off_block:.3e}  copy mismatch {report.copy_mismatch:.3e}"
    )
    return 0 if report.ok() else 1


def cmd_prob(args) -> int:
    state, _ = _state(args.target, args.n, args.bad_mode)
    U = _network(args.network, state.d)
    rows = outcome_probabilities(state, U)
    irreps = list(state.blocks)
    if args.format == "json":
        out = [
            {"outcome": "".join(map(str, r.occ)), "p_total": r.p_total,
             "per_irrep": {_label(l): r.per_irrep.get(l, 0.0) for l in irreps}}
            for r in rows
        ]
        print(json.dumps(out, indent=1))
    else:
        w = csv.writer(sys.stdout)
        w.writerow(["outcome", "p_total"] + [_label(l) for l in irreps])
        for r in rows:
            w.writerow(["".join(map(str, r.occ)), f"{r.p_total:.15g}"] + [f"{r.per_irrep.get(l, 0.0):.15g}" for l in irreps])
    return 0


def cmd_optimize(args) -> int:
    if args.force_coincidence:
        if args.target != "d" or args.n is None:
            raise UsageError("--force-coincidence needs --target d and --n")
        problem = forced_coincidence_problem(args.n, xi=args.xi_ladder[0] if args.xi_ladder else 6.0, eta=args.eta)
    elif args.target.startswith("fock:"):
        target, A = _state(args.target, None, None)
        ref = rho_from_fock_array(np.array([A.sum(axis=1)]).T)
        bound = bound_general(tuple(A.sum(axis=0))) if (A.sum(axis=1) == 1).all() else None
        problem = DiscriminationProblem(target, ref, epsilon=args.epsilon, bound=bound)
    else:
        if args.n is None:
            raise UsageError("--n is required")
        problem = make_problem(args.target, args.n, args.bad_mode, epsilon=args.epsilon)
    problem.epsilon = args.epsilon
    config = OptimizeConfig(
        restarts=args.restarts,
        seed=args.seed,
        xi_ladder=tuple(args.xi_ladder) if args.xi_ladder else None,
        jobs=args.jobs,
        basin_hops=args.basin_hops,
    )
    result = optimize(problem, config)
    payload = result.to_json()
    payload["problem"] = {
        "N": problem.N, "d": problem.d, "target": args.target, "bad_mode": args.bad_mode,
        "epsilon": problem.epsilon, "eta": problem.eta,
        "forced_outcome": None if problem.forced_outcome is None else "".join(map(str, problem.forced_outcome)),
    }
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text)
    elif args.format == "json":
        print(text)
    bound = "n/a" if result.bound is None else f"{result.bound} ({float(result.bound):.6f})"
    print(f"success {result.success:.12f}  bound {bound}  |D| = {len(result.D)}", file=sys.stderr if args.format == "json" and not args.out else sys.stdout)
    return 0


def cmd_reproduce(args) -> int:
    N_values = range(2, args.n_max + 1)
    if args.table == 1:
        cells = table1(N_values)
        lines = [c.line() for c in cells]
        statuses = [c.status for c in cells]
    else:
        checks = table2(range(2, min(args.n_max, 5) + 1))
        lines = [c.line() for c in checks]
        statuses = [c.status for c in checks]
    for line in lines:
        print(line)
    n_fail = statuses.count("FAIL")
    print(f"{statuses.count('PASS')} pass, {statuses.count('WARN')} warn, {n_fail} fail")
    return 1 if n_fail else 0


def cmd_state_show(args) -> int:
    state, _ = _state(args.target, args.n, args.bad_mode)
    if args.format == "json":
        print(json.dumps(state.to_json(), indent=1))
        return 0
    print(f"{state.name}: N={state.N} d={state.d}")
    for lam, B in state.blocks.items():
        print(f"{_label(lam)} weight {state.weights[lam]:.12g} copies {sym_dim(lam)}")
        support = state.support(lam)
        idx = [state.labels(lam).index(l) for l in support]
        for (occ, r), row in zip(support, B[np.ix_(idx, idx)]):
            vals = " ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row)
            print(f"  {''.join(map(str, occ))} r={r}: {vals}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distinguish", description=__doc__.splitlines()[0])
    parser.add_argument("--cache-dir", default=None, help=f"transform cache directory (env {CACHE_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    cache = sub.add_parser("cache", help="build or verify cached transforms")
    cache_sub = cache.add_subparsers(dest="action", required=True)
    for name in ("build", "verify"):
        p = cache_sub.add_parser(name)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=5)

    def state_flags(p):
        p.add_argument("--n", type=int)
        p.add_argument("--target", default="d", help="i, s, d, sm or fock:<json file>")
        p.add_argument("--bad-mode", type=int, default=None, help="1-based System mode of the odd photon")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    prob = sub.add_parser("prob", help="outcome probabilities with per-irrep contributions")
    state_flags(prob)
    prob.add_argument("--network", default="qft", help="qft, table1, reck:<file> or file:<interferometer json>")

    opt = sub.add_parser("optimize", help="search for a discriminating interferometer")
    state_flags(opt)
    opt.add_argument("--xi-ladder", type=float, nargs="+", default=None)
    opt.add_argument("--eta", type=float, default=10.0)
    opt.add_argument("--restarts", type=int, default=20)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--epsilon", type=float, default=1e-9)
    opt.add_argument("--jobs", type=int, default=1)
    opt.add_argument("--basin-hops", type=int, default=0)
    opt.add_argument("--force-coincidence", action="store_true")
    opt.add_argument("--out", default=None, help="write the result JSON here")

    rep = sub.add_parser("reproduce", help="recompute the reference tables")
    rep.add_argument("--table", type=int, choices=[1, 2], required=True)
    rep.add_argument("--n-max", type=int, default=None)

    state = sub.add_parser("state", help="inspect reduced states")
    state_sub = state.add_subparsers(dest="action", required=True)
    show = state_sub.add_parser("show")
    state_flags(show)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir is not None:
        import os

        os.environ[CACHE_ENV_VAR] = args.cache_dir
    try:
        if args.command == "cache":
            return cmd_cache_build(args) if args.action == "build" else cmd_cache_verify(args)
        if args.command == "prob":
            return cmd_prob(args)
        if args.command == "optimize":
            return cmd_optimize(args)
        if args.command == "reproduce":
            if args.n_max is None:
                args.n_max = 8 if args.table == 1 else 5
            return cmd_reproduce(args)
        if args.command == "state":
            return cmd_state_show(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DistinguishError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
