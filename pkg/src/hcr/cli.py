"""Command-line front end.

Exit codes: 0 = H0 accepted (or command succeeded), 3 = H0 rejected,
1 = runtime error, 2 = usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from . import independence as ind
from .bench import METHOD_IDS, DEFAULT_METHODS, RotationSweepConfig, aggregate, run_rotation_sweep, run_seeds
from .errors import HcrError
from .hsic import EXPONENTS, hsic_gamma_test, hsic_permutation_test
from .infotheory import mi_corrected
from .ingest import load_joint, load_paired
from .svdopt import simulate_singular_null

SCHEMA = 1
EXIT_ACCEPT, EXIT_ERROR, EXIT_USAGE, EXIT_REJECT = 0, 1, 2, 3

CLI_METHODS = {
    "minmax": "minmax",
    "sorted-extremes": "sorted_extremes",
    "loglik": "loglik",
    "chi2": "chi2",
    "perm-sum-z2": "perm_sum_z2",
    "perm-max-z": "perm_max_z",
}


def _ranged(kind, lo=None, hi=None, lo_open=False, hi_open=False):
    def parse(text):
        try:
            val = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}") from None
        if lo is not None and (val < lo or (lo_open and val == lo)):
            raise argparse.ArgumentTypeError(f"{val} is below the allowed range")
        if hi is not None and (val > hi or (hi_open and val == hi)):
            raise argparse.ArgumentTypeError(f"{val} is above the allowed range")
        return val

    return parse


def _bandwidth(text):
    if text in ("median", "median_x2"):
        return text
    try:
        sx, sy = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("bandwidth is 'median', 'median_x2' or 'SX,SY'") from None
    if sx <= 0 or sy <= 0:
        raise argparse.ArgumentTypeError("fixed bandwidths must be positive")
    return (sx, sy)


def _add_input(p):
    p.add_argument("inputs", nargs="+", metavar="FILE",
                   help="X and Y files, or a single joint file together with --split")
    p.add_argument("--split", type=_ranged(int, 1), help="column index splitting a joint file into X | Y (>= 1)")
    p.add_argument("--input-format", choices=("csv", "tsv"), default=None,
                   help="delimiter of the input files (default: sniffed)")


def _add_output(p):
    p.add_argument("--format", choices=("json", "csv", "text"), default="json", help="report format")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="RNG seed for randomized procedures (default 0)")
    p.add_argument("--threads", type=_ranged(int, 1), default=1, help="worker threads (>= 1, default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcr", description="HCR and HSIC independence tests")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="HCR independence test")
    _add_input(t)
    t.add_argument("--method", choices=tuple(CLI_METHODS), default="minmax", help="final test")
    t.add_argument("--m", type=_ranged(int, 1, 32), default=4, help="polynomial degree (1..32, default 4)")
    t.add_argument("--k", type=_ranged(int, 0), default=1, help="extremes per side for sorted-extremes (2k <= M)")
    t.add_argument("--alpha", type=_ranged(float, 0, 1, True, True), default=0.05, help="significance level in (0,1)")
    t.add_argument("--B", type=_ranged(int, 100), default=800, help="permutations (>= 100, default 800)")
    t.add_argument("--basis", choices=("pairwise", "triplewise"), default="pairwise")
    t.add_argument("--variance-rule", choices=("unit", "empirical"), default=None,
                   help="score normalization (default: unit for pairwise, empirical otherwise)")
    t.add_argument("--calibrate", action="store_true",
                   help="turn minmax/sorted-extremes scores into Monte-Carlo p-values")
    t.add_argument("--calibration-reps", type=_ranged(int, 100), default=10_000)
    _add_common(t)
    _add_output(t)

    mi = sub.add_parser("mi", help="mutual information estimate")
    _add_input(mi)
    mi.add_argument("--m", type=_ranged(int, 1, 32), default=4, help="polynomial degree (1..32)")
    mi.add_argument("--basis", choices=("pairwise", "triplewise"), default="pairwise")
    _add_output(mi)

    h = sub.add_parser("hsic", help="HSIC independence test")
    _add_input(h)
    h.add_argument("--method", choices=("gamma", "permutation"), default="gamma", help="calibration")
    h.add_argument("--alpha", type=_ranged(float, 0, 1, True, True), default=0.05)
    h.add_argument("--B", type=_ranged(int, 100), default=400,
                   help="permutations (>= 100); gamma uses 200 internal permutations")
    h.add_argument("--bandwidth", type=_bandwidth, default="median", help="median | median_x2 | SX,SY")
    h.add_argument("--kernel-exponent", choices=EXPONENTS, default="squared")
    _add_common(h)
    _add_output(h)

    b = sub.add_parser("bench", help="rotation-sweep benchmark")
    b.add_argument("--n", type=_ranged(int, 20), default=1000, help="sample size (>= 20)")
    b.add_argument("--m", type=_ranged(int, 1, 32), default=6)
    b.add_argument("--B", type=_ranged(int, 100), default=400)
    b.add_argument("--alpha", type=_ranged(float, 0, 1, True, True), default=0.05)
    b.add_argument("--delta-theta", type=_ranged(float, 0, None, True), default=0.25, help="degrees per step (> 0)")
    b.add_argument("--max-theta", type=_ranged(float, 0), default=6.0, help="last angle in degrees")
    b.add_argument("--within-block", type=float, default=50.0, help="independence-preserving x-block rotation")
    b.add_argument("--methods", default=",".join(DEFAULT_METHODS), help="comma list from: " + ", ".join(METHOD_IDS))
    b.add_argument("--seeds", type=_ranged(int, 1), default=1, help="number of seeds, starting at --seed")
    b.add_argument("--out", required=True, help="output prefix; writes PREFIX.csv, PREFIX.json, PREFIX.dat")
    _add_common(b)

    nc = sub.add_parser("null-cache", help="simulate and cache a singular-value null")
    nc.add_argument("--p", type=_ranged(int, 1), default=4, help="rows (>= 1)")
    nc.add_argument("--q", type=_ranged(int, 1), default=4, help="columns (>= 1)")
    nc.add_argument("--trials", type=_ranged(int, 1000), default=100_000, help="random matrices (>= 1000)")
    nc.add_argument("--seed", type=int, default=0)
    nc.add_argument("--out", required=True, help="output file (.npz or .json)")
    return parser


def _load(args):
    if args.split is not None:
        if len(args.inputs) != 1:
            raise HcrError("--split expects a single joint input file")
        return load_joint(args.inputs[0], args.split, args.input_format)
    if len(args.inputs) != 2:
        raise HcrError("expected two input files (X and Y) or one file with --split")
    return load_paired(args.inputs[0], args.inputs[1], args.input_format)


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    flat = {}

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for key in sorted(obj):
                walk(f"{prefix}.{key}" if prefix else key, obj[key])
        else:
            flat[prefix] = obj

    walk("", payload)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for key, val in flat.items():
            w.writerow([key, json.dumps(val)])
        return buf.getvalue()
    return "".join(f"{key}: {val}\n" for key, val in flat.items())


def _emit(payload: dict, args) -> None:
    text = _render(payload, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_test(args) -> int:
    pair = _load(args)
    method = CLI_METHODS[args.method]
    report = ind.run_test(pair, method, m=args.m, alpha=args.alpha, k=args.k, B=args.B, seed=args.seed,
                          basis=args.basis, variance_rule=args.variance_rule, calibrate=args.calibrate,
                          calibration_reps=args.calibration_reps, threads=args.threads)
    report.meta.setdefault("seed", args.seed)
    _emit({"schema": SCHEMA, "command": "test", "n": pair.n, "report": report.to_dict()}, args)
    return EXIT_REJECT if report.reject else EXIT_ACCEPT


def cmd_mi(args) -> int:
    pair = _load(args)
    table = ind.hcr_scores(pair, args.m, args.basis)
    est = mi_corrected(table)
    payload = {"schema": SCHEMA, "command": "mi", "n": pair.n, "m": args.m, "basis": args.basis,
               "M": table.M, "mi_raw": est.raw, "mi_corrected": est.corrected, "units": "nits"}
    if args.format == "json":
        payload["coefficients"] = table.to_dict()
    _emit(payload, args)
    return EXIT_ACCEPT


def cmd_hsic(args) -> int:
    pair = _load(args)
    if args.method == "gamma":
        res = hsic_gamma_test(pair, args.alpha, args.bandwidth, seed=args.seed, exponent=args.kernel_exponent,
                              threads=args.threads)
    else:
        res = hsic_permutation_test(pair, args.alpha, args.B, args.seed, args.bandwidth, args.kernel_exponent,
                                    args.threads)
    _emit({"schema": SCHEMA, "command": "hsic", "n": pair.n, "result": res.to_dict()}, args)
    return EXIT_REJECT if res.reject else EXIT_ACCEPT


def cmd_bench(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = RotationSweepConfig(n=args.n, m=args.m, B_perm=args.B, alpha=args.alpha,
                                 delta_theta_deg=args.delta_theta, max_theta_deg=args.max_theta,
                                 within_block_deg=args.within_block, seed=args.seed, methods=methods)
    if args.seeds == 1:
        result = run_rotation_sweep(config)
        result.to_csv(args.out + ".csv")
        result.to_json(args.out + ".json")
        result.to_gnuplot(args.out + ".dat")
        return EXIT_ACCEPT
    results = run_seeds(config, range(args.seed, args.seed + args.seeds))
    with open(args.out + ".csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "theta_deg", "method", "p_value"])
        for r in results:
            for theta, mth, p in r.rows:
                w.writerow([r.config.seed, f"{theta:g}", mth, repr(p)])
    summary = {"schema": SCHEMA, "config": config.to_dict(), "seeds": [r.config.seed for r in results],
               "first_reject": {r.config.seed: r.first_reject for r in results}, "aggregate": aggregate(results)}
    with open(args.out + ".json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return EXIT_ACCEPT


def cmd_null_cache(args) -> int:
    null = simulate_singular_null(args.p, args.q, args.trials, args.seed)
    null.save(args.out)
    return EXIT_ACCEPT


COMMANDS = {"test": cmd_test, "mi": cmd_mi, "hsic": cmd_hsic, "bench": cmd_bench, "null-cache": cmd_null_cache}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (HcrError, ValueError, OSError, IndexError) as exc:
        print(f"hcr: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
