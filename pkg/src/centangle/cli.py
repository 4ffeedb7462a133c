"""Command-line entry point: ``centangle <command> [options]``.

Exit status is 0 on success, 2 on invalid input and 3 when a reproduction
target does not match the published values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import hierarchy as hi
from . import lp, reproduce, stabilizer, swaptest
from .haar import haar_experiment, write_histogram
from .statevec import (
    MAX_PURE_QUBITS,
    CapExceeded,
    PureState,
    concentratable_entanglement,
    load_state,
    purity_vector,
)

SCHEMA_VERSION = 1
CE_TOL = 1e-9  # margin for simulated CE values against exact thresholds
EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 2, 3


class Mismatch(Exception):
    pass


def _exact(x: Fraction) -> dict:
    return {"value": float(x), "exact": f"{x.numerator}/{x.denominator}"}


def _emit(args, payload: dict, rows: list | None = None, header=None):
    """Write ``payload`` as JSON, or ``rows`` as CSV when ``--format csv``."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows is None:
            header = ("key", "value")
            rows = [(k, v) for k, v in payload.items() if not isinstance(v, (dict, list))]
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(n: int) -> hi.HierarchyTable:
    return hi.build_hierarchy(n, hi.CmaxTable.from_lp(n))


# ----------------------------------------------------------------- commands


def cmd_ce(args):
    state = load_state(args.state)
    pv = purity_vector(state, max_pure=args.max_n)
    ce = concentratable_entanglement(pv)
    single = pv.single()
    payload = {
        "n": state.n,
        "ce": ce,
        "pure": isinstance(state, PureState),
        "single_qubit_purities": [float(p) for p in single],
        "min_purity": float(pv.vals.min()),
    }
    if state.n >= 2:
        clipped = min(max(ce, 0.0), 1.0)
        payload["certification"] = hi.certify(clipped, state.n, _table(state.n), tol=CE_TOL).to_json()
    if args.distribution:
        dist = swaptest.bitstring_distribution(pv)
        payload["distribution"] = {swaptest.to_bitstring(z, state.n): float(p)
                                   for z, p in enumerate(dist.probs) if abs(p) > 1e-15}
    _emit(args, payload)


def cmd_swaptest(args):
    state = load_state(args.state)
    pv = purity_vector(state, max_pure=args.max_n)
    dist = swaptest.bitstring_distribution(pv)
    samples = swaptest.sample_bitstrings(dist, args.shots, args.seed)
    ledger = swaptest.ExclusionLedger(state.n)
    for z in np.unique(samples):
        ledger = swaptest.record_and_exclude(ledger, int(z))
    mean, var = swaptest.empirical_bell_pairs(samples)
    exact = swaptest.bell_pair_stats(pv)
    path = None
    if args.samples_out:
        path = str(args.samples_out)
        with open(path, "w") as fh:
            fh.writelines(swaptest.to_bitstring(int(z), state.n) + "\n" for z in samples)
    payload = {
        "n": state.n,
        "shots": args.shots,
        "seed": args.seed,
        "ce_estimate": float(np.mean(samples != 0)),
        "ce_exact": concentratable_entanglement(pv),
        "p0": dist.p0,
        "excluded_rank": ledger.rank,
        "surviving_bipartitions": ledger.surviving_bipartitions(),
        "bell_mean": mean,
        "bell_variance": var,
        "bell_mean_exact": exact.mean,
        "bell_variance_exact": exact.variance,
        "samples_path": path,
    }
    _emit(args, payload)


def cmd_hierarchy(args):
    table = _table(args.n)
    rows = [(str(r.structure), reproduce.decimal_string(r.zeta_star)) for r in table.rows]
    payload = {
        "n": args.n,
        "rows": [
            {"structure": str(r.structure), "zeta_star": float(r.zeta_star),
             "exact": str(r.zeta_star), "loose": r.loose}
            for r in table.rows
        ],
    }
    _emit(args, payload, rows, ("structure", "zeta_star"))


def cmd_certify(args):
    cmax = hi.CmaxTable.from_lp(args.n)
    report = hi.certify(args.ce, args.n, hi.build_hierarchy(args.n, cmax)).to_json()
    if args.purity is not None:
        report["purity"] = args.purity
        report["mixed_cuts"] = [
            {"k": k, "threshold": hi.mixed_cut_threshold(args.purity, args.n, k, cmax),
             "excluded": hi.certify_mixed(args.ce, args.purity, args.n, k, cmax)}
            for k in range(1, args.n // 2 + 1)
        ]
    _emit(args, report)


def cmd_lp(args):
    if args.lp_command == "cmax":
        sol = lp.solve_cmax_lp(args.n)
        payload = {"n": args.n, "optimal_value": _exact(sol.optimal_value),
                   "ce_bound": _exact(sol.ce_bound), "certified": sol.certified,
                   "y": [str(v) for v in sol.y], "weights": list(sol.weights)}
    elif args.lp_command == "bell":
        sol = lp.solve_bell_lp(args.n)
        payload = {"n": args.n, "optimal_value": _exact(sol.optimal_value),
                   "certified": sol.certified}
    else:
        A = [int(a) for a in args.enumerator.split(",")]
        enums = lp.Enumerators.from_A(A, args.n, args.k)
        check = lp.check_coding_bound(enums)
        payload = {"n": args.n, "k": args.k, "B": [str(b) for b in enums.B],
                   "lhs": _exact(check.lhs), "rhs": _exact(check.rhs),
                   "general_form": check.general_form, "holds": check.holds}
    _emit(args, payload)


def cmd_graph(args):
    if args.graph_command == "ce":
        g = stabilizer.load_graph(args.graph)
        group = stabilizer.graph_state_group(g)
        we = stabilizer.enumerate_weights(group)
        report = stabilizer.verify_extremal_claims(group)
        payload = {"n": g.n, "ce": _exact(stabilizer.ce_from_enumerator(we)), "A": list(we.A),
                   "distance": report.distance, "type": "II" if report.type_ii else "I",
                   "extremal": report.extremal}
    else:
        exhaustive = args.exhaustive or (not args.random and args.n <= stabilizer.MAX_EXHAUSTIVE_QUBITS)
        ce, g = stabilizer.search_graph_states(args.n, exhaustive=exhaustive, seed=args.seed,
                                               iters=args.iters, workers=args.workers)
        payload = {"n": args.n, "mode": "exhaustive" if exhaustive else "random",
                   "best_ce": _exact(ce), "graph": g.to_json()}
    _emit(args, payload)


def cmd_haar(args):
    zeta = hi.gme_threshold(args.n, hi.CmaxTable.from_lp(args.n)) if args.n >= 2 else None
    stats, ces = haar_experiment(args.n, args.samples, args.seed, threshold=zeta, return_values=True)
    if args.hist:
        write_histogram(ces, args.hist, bins=args.bins)
    payload = stats.to_json()
    payload["seed"] = args.seed
    _emit(args, payload)


def cmd_reproduce(args):
    out_dir = args.out or "out"
    failed = []
    for target in args.targets:
        rep = reproduce.run_target(target, out_dir=out_dir, seed=args.seed, max_n=args.max_n)
        status = "ok" if rep.ok else "MISMATCH"
        print(f"{target}: {status} ({len(rep.rows)} rows written to {out_dir}/{target}.csv)")
        for m in rep.mismatches:
            print(f"  {m}")
        if not rep.ok:
            failed.append(target)
    if failed:
        raise Mismatch(", ".join(failed))


# ------------------------------------------------------------------ parser


def _common(defaults: bool) -> argparse.ArgumentParser:
    # subcommand copies use SUPPRESS so they do not clobber values given before the subcommand
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--out", default=d(None), help="output file (directory for reproduce)")
    p.add_argument("--max-n", type=int, default=d(None), help="resource cap on qubit count")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="centangle", parents=[_common(True)],
                                     description="Concentratable entanglement toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common(False)]

    p = sub.add_parser("ce", parents=common, help="CE and certification for a state file")
    p.add_argument("state")
    p.add_argument("--distribution", action="store_true", help="include p(z)")
    p.set_defaults(func=cmd_ce)

    p = sub.add_parser("swaptest", parents=common, help="simulate parallel SWAP tests")
    p.add_argument("state")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--samples-out", help="write sampled bitstrings here, one per line")
    p.set_defaults(func=cmd_swaptest)

    p = sub.add_parser("hierarchy", parents=common, help="CE hierarchy for n qubits")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("certify", parents=common, help="certify structure from a CE value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ce", type=float, required=True)
    p.add_argument("--purity", type=float)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("lp", parents=common, help="linear programs")
    lsub = p.add_subparsers(dest="lp_command", required=True)
    for name in ("cmax", "bell"):
        q = lsub.add_parser(name, parents=common)
        q.add_argument("--n", type=int, required=True)
    q = lsub.add_parser("bound", parents=common, help="coding bound for an enumerator")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, default=0)
    q.add_argument("--enumerator", required=True, help="comma-separated A_0..A_n")
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser("graph", parents=common, help="graph states")
    gsub = p.add_subparsers(dest="graph_command", required=True)
    q = gsub.add_parser("ce", parents=common)
    q.add_argument("--graph", required=True)
    q = gsub.add_parser("search", parents=common)
    q.add_argument("--n", type=int, required=True)
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--random", action="store_true")
    q.add_argument("--iters", type=int, default=200)
    q.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("haar", parents=common, help="Haar-random CE statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=6000)
    p.add_argument("--hist", help="write a histogram CSV here")
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(func=cmd_haar)

    p = sub.add_parser("reproduce", parents=common, help="regenerate published tables")
    p.add_argument("targets", nargs="+", choices=reproduce.TARGETS)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_n is None:
        args.max_n = lp.MAX_LP_QUBITS if args.command == "reproduce" else MAX_PURE_QUBITS
    try:
        args.func(args)
    except Mismatch:
        return EXIT_MISMATCH
    except (ValueError, CapExceeded, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
