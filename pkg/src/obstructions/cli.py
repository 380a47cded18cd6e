"""Command-line front end: construct patterns, verify hitting, measure
densities, run no-copy checks, compute discrepancies, render the planar set.

Reports are schema-stable JSON: a ``config`` echo of every resolved
parameter, the module reports, a ``pass`` flag (conjunction of sub-report
passes), and a volatile ``meta`` block (timestamp, wall clock) that is the
only part allowed to differ between identical reruns. Rationals are
serialized as {num, den} pairs. Output files are written atomically.

Exit codes: 0 all checks passed, 1 a mathematical check failed (witness in
the report), 2 usage or budget error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
import tempfile
import time
from fractions import Fraction

from . import __version__
from .torus import BudgetError, exact_discrepancy, grid_discrepancy
from .patterns import (
    NET_CELL_BUDGET,
    Pattern,
    PolySeqSpec,
    bertrand_prime,
    build_nets,
    calibrate_sampled,
    elementary_pattern,
    scale_for_budget,
    thin_pattern,
    verify_hitting_net,
    verify_hitting_sampled,
)
from .annuli import AnnulusSpec, density, no_copy_check

THREADS_ENV = "OBSTRUCTIONS_THREADS"


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_report(args, subcommand: str, config: dict, reports: dict,
                 passed: bool, t_start: float) -> int:
    payload = {
        "tool": {"name": "obstructions", "version": __version__},
        "subcommand": subcommand,
        "config": config,
        "reports": reports,
        "pass": bool(passed),
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wall_clock_s": time.perf_counter() - t_start,
        },
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        _atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return 0 if passed else 1


def _write_pattern_file(path: str, pattern: Pattern, degree: int,
                        leading: Fraction, epsilon_verified) -> None:
    doc = {
        "n": pattern.n,
        "p": degree,
        "Q": pattern.universe,
        "A_num": leading.numerator,
        "A_den": leading.denominator,
        "indices": list(pattern.indices),
        "provenance": pattern.provenance,
        "epsilon_verified": epsilon_verified,
    }
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_pattern_file(path: str):
    with open(path) as fh:
        doc = json.load(fh)
    pattern = Pattern(tuple(doc["indices"]), doc["Q"], doc["provenance"])
    leading = Fraction(doc["A_num"], doc["A_den"])
    return pattern, doc["p"], leading, doc.get("epsilon_verified")


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    return int(os.environ.get(THREADS_ENV, "1"))


def _apply_config_file(parser: argparse.ArgumentParser, argv):
    """Plain key=value config files mirroring the long flags."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            extra += [f"--{key.strip()}", value.strip()]
    # command-line flags win: config-derived flags go first
    return rest[:1] + extra + rest[1:]


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_construct(args) -> int:
    t0 = time.perf_counter()
    if args.mode == "elementary":
        if args.calibrate:
            raise ValueError("--calibrate applies to thinned patterns only")
        pattern, leading = elementary_pattern(args.n)
        degree = 2
        seed = None
    else:
        degree = args.p
        universe = args.Q if args.Q else bertrand_prime(args.n, degree)
        seed = args.seed
        pattern = thin_pattern(args.n, universe, seed)
        leading = Fraction(1, universe)

    reports = {}
    epsilon_verified = None
    passed = True
    if args.calibrate:
        cal = calibrate_sampled(
            pattern.n, degree, pattern.universe, seed=args.seed,
            n_samples=args.samples, retries=args.retries,
            epsilon_target=args.target_epsilon, threads=_threads(args),
        )
        pattern = cal.pattern
        epsilon_verified = cal.epsilon_min
        reports["calibration"] = cal.to_dict()
        passed = cal.achieved
    elif args.epsilon is not None:
        rep = verify_hitting_sampled(
            pattern, leading, degree, args.epsilon,
            n_samples=args.samples, seed=args.seed, threads=_threads(args),
        )
        reports["hitting"] = rep.to_dict()
        epsilon_verified = args.epsilon if rep.passed else None
        passed = rep.passed

    _write_pattern_file(args.pattern_out, pattern, degree, leading, epsilon_verified)
    config = {
        "mode": args.mode, "n": args.n, "p": degree,
        "Q": pattern.universe, "seed": seed,
        "epsilon": args.epsilon, "calibrate": args.calibrate,
        "samples": args.samples, "retries": args.retries,
        "target_epsilon": args.target_epsilon,
        "pattern_out": args.pattern_out,
    }
    reports["pattern"] = pattern.to_dict()
    reports["leading"] = {"num": leading.numerator, "den": leading.denominator}
    return _emit_report(args, "construct", config, reports, passed, t0)


def _cmd_verify(args) -> int:
    t0 = time.perf_counter()
    pattern, degree, leading, eps_file = _read_pattern_file(args.pattern)
    epsilon = args.epsilon if args.epsilon is not None else eps_file
    if epsilon is None:
        raise ValueError("no epsilon given and none recorded in the pattern file")
    threads = _threads(args)
    if args.method == "net":
        scale = args.resolution_scale
        if args.net_cells:
            scale = scale_for_budget(degree, pattern.universe,
                                     float(epsilon) if epsilon != "auto" else 0.5,
                                     args.net_cells)
        nets = build_nets(degree, pattern.universe,
                          float(epsilon) if epsilon != "auto" else 0.5,
                          resolution_scale=scale, max_cells=args.budget)
        rep = verify_hitting_net(pattern, leading, degree, epsilon, nets,
                                 threads=threads)
        reports = {"nets": nets.to_dict(), "hitting": rep.to_dict()}
    else:
        if epsilon == "auto":
            raise ValueError("epsilon 'auto' needs net mode; sampled runs "
                             "report the worst observed gap at a fixed epsilon")
        rep = verify_hitting_sampled(pattern, leading, degree, float(epsilon),
                                     n_samples=args.samples, seed=args.seed,
                                     threads=threads)
        reports = {"hitting": rep.to_dict()}
    config = {
        "pattern": args.pattern, "method": args.method, "epsilon": epsilon,
        "samples": args.samples, "seed": args.seed,
        "resolution_scale": args.resolution_scale, "net_cells": args.net_cells,
        "budget": args.budget, "threads": threads,
    }
    return _emit_report(args, "verify", config, reports, rep.passed, t0)


def _cmd_density(args) -> int:
    t0 = time.perf_counter()
    spec = AnnulusSpec(args.d, args.p, args.epsilon)
    rep = density(spec, args.R, method=args.method, seed=args.seed,
                  samples=args.samples)
    config = {"d": args.d, "p": args.p, "epsilon": args.epsilon, "R": args.R,
              "method": args.method, "seed": args.seed, "samples": args.samples}
    return _emit_report(args, "density", {**config},
                        {"spec": spec.to_dict(), "density": rep.to_dict()},
                        True, t0)


def _cmd_nocopy(args) -> int:
    t0 = time.perf_counter()
    pattern, degree, leading, eps_file = _read_pattern_file(args.pattern)
    epsilon = args.epsilon if args.epsilon is not None else eps_file
    if epsilon is None:
        raise ValueError("no epsilon given and none recorded in the pattern file")
    spec = AnnulusSpec(args.d, degree, float(epsilon))
    j_list = [int(tok) for tok in args.j_list.split(",")]
    rep = no_copy_check(spec, pattern, leading, j_list, args.samples,
                        seed=args.seed, pattern_epsilon=eps_file)
    config = {"pattern": args.pattern, "d": args.d, "epsilon": float(epsilon),
              "j_list": j_list, "samples": args.samples, "seed": args.seed}
    return _emit_report(args, "nocopy", config,
                        {"spec": spec.to_dict(), "nocopy": rep.to_dict()},
                        rep.passed, t0)


def _read_points_csv(path: str):
    values = []
    with open(path) as fh:
        for line in fh:
            tok = line.strip().split(",")[0]
            if not tok:
                continue
            try:
                values.append(float(tok))
            except ValueError:
                continue  # header line
    return values


def _parse_coefficient(token: str, exact: bool):
    """num/den and decimal strings parse exactly; plain floats stay floats."""
    if "/" in token:
        num, _, den = token.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(token) if exact else float(token)


def _cmd_discrepancy(args) -> int:
    t0 = time.perf_counter()
    if args.points:
        values = _read_points_csv(args.points)
        source = {"points": args.points}
    else:
        num, _, den = args.A.partition("/")
        leading = Fraction(int(num), int(den or "1"))
        lower = tuple(_parse_coefficient(tok, args.exact)
                      for tok in args.B.split(",")) if args.B else ()
        degree = len(lower) + 1
        spec = PolySeqSpec(degree, leading, lower)
        values = list(spec.values(range(args.N)))
        source = {"A": {"num": leading.numerator, "den": leading.denominator},
                  "B": [float(c) for c in lower], "N": args.N, "degree": degree}
    if args.dump:
        _atomic_write(args.dump,
                      "\n".join(repr(v) for v in values) + "\n")
    if args.estimate:
        est = grid_discrepancy(values, grid=args.grid)
        reports = {"discrepancy_estimate": {"value": est, "grid": args.grid,
                                            "kind": "lower-bound"}}
        passed = True
    else:
        report = exact_discrepancy(values, et_cutoff=args.M)
        passed = True
        if report.et_bound is not None:
            passed = report.et_bound >= report.exact_discrepancy - 1e-12
        reports = {"discrepancy": report.to_dict()}
    config = {"M": args.M, "dump": args.dump, "estimate": args.estimate,
              "grid": args.grid, **source}
    return _emit_report(args, "discrepancy", config, reports, passed, t0)


def _render_svg(epsilon: float, R: float, size: int = 640):
    """Shaded annuli where dist(|x|^2, Z) < (1-eps)/2, drawn to scale."""
    w = (1.0 - epsilon) / 2.0
    half = R / 2.0
    px = size / R
    cx = cy = size / 2.0

    def circle_path(r):
        rp = r * px
        return (f"M {cx + rp:.3f} {cy:.3f} "
                f"A {rp:.3f} {rp:.3f} 0 1 0 {cx - rp:.3f} {cy:.3f} "
                f"A {rp:.3f} {rp:.3f} 0 1 0 {cx + rp:.3f} {cy:.3f} Z")

    shells_inside = int(math.floor(half * half + w))  # annuli m >= 1 within R/2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<!-- annuli dist(|x|^2,Z) < {w}; side {R}; shells within R/2: "
        f"{shells_inside} -->",
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    m = 0
    while math.sqrt(max(m - w, 0.0)) <= half * math.sqrt(2.0):
        inner = math.sqrt(max(m - w, 0.0))
        outer = math.sqrt(m + w)
        if m == 0:
            parts.append(f'<circle cx="{cx}" cy="{cy}" r="{outer * px:.3f}" '
                         f'fill="#c8c8c8" stroke="#707070" stroke-width="0.6"/>')
        else:
            parts.append(f'<path d="{circle_path(outer)} {circle_path(inner)}" '
                         f'fill="#c8c8c8" fill-rule="evenodd" '
                         f'stroke="#707070" stroke-width="0.6"/>')
        m += 1
    parts.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n", shells_inside


def _cmd_render(args) -> int:
    t0 = time.perf_counter()
    if args.p != 2 or args.d != 2:
        raise ValueError("render supports d=2, p=2 (circular annuli) only")
    svg, shells = _render_svg(args.epsilon, args.R)
    _atomic_write(args.out, svg)
    config = {"d": args.d, "p": args.p, "epsilon": args.epsilon, "R": args.R,
              "out": args.out}
    return _emit_report(args, "render", config, {"shells_within_half_side": shells},
                        True, t0)


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstructions",
        description="Construct and verify hitting patterns and obstruction sets.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="write the JSON report here")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default ${THREADS_ENV} or 1)")

    p = sub.add_parser("construct", help="build a pattern file")
    p.add_argument("--mode", choices=("thinned", "elementary"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=2, help="polynomial degree")
    p.add_argument("--Q", type=int, default=None,
                   help="universe override (default: Bertrand prime)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=None,
                   help="verify (sampled) at this epsilon and record it")
    p.add_argument("--calibrate", action="store_true",
                   help="search seeds for the smallest passing epsilon")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--retries", type=int, default=1)
    p.add_argument("--target-epsilon", type=float, default=None)
    p.add_argument("--pattern-out", required=True)
    common(p)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("verify", help="verify the hitting property")
    p.add_argument("--pattern", required=True)
    p.add_argument("--method", choices=("net", "sampled"), required=True)
    p.add_argument("--epsilon", default=None,
                   help="float, or 'auto' (net mode) for the smallest passing")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution-scale", type=float, default=1.0)
    p.add_argument("--net-cells", type=int, default=None,
                   help="choose resolution_scale so the net fits this many cells")
    p.add_argument("--budget", type=int, default=NET_CELL_BUDGET)
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("density", help="volume fraction of the obstruction set")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--method", choices=("monte-carlo", "exact-slice"),
                   default="monte-carlo")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("nocopy", help="sampled placements must leave the set")
    p.add_argument("--pattern", required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=None,
                   help="set epsilon (default: the pattern file's verified value)")
    p.add_argument("--j-list", default="1,2,3,4,5")
    p.add_argument("--samples", type=int, default=10_000,
                   help="placements per scale index")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_nocopy)

    p = sub.add_parser("discrepancy", help="exact discrepancy and the ET bound")
    p.add_argument("--points", default=None, help="CSV of point values in [0,1)")
    p.add_argument("--A", default=None, help="leading coefficient num/den")
    p.add_argument("--B", default=None,
                   help="lower coefficients k^1.., comma separated; their "
                        "count sets the degree (e.g. --B 0 makes A quadratic)")
    p.add_argument("--N", type=int, default=None, help="sequence length")
    p.add_argument("--exact", action="store_true",
                   help="treat lower coefficients as exact rationals")
    p.add_argument("--M", type=int, default=None, help="Erdos-Turan cutoff")
    p.add_argument("--dump", default=None, help="write the points as CSV")
    p.add_argument("--estimate", action="store_true",
                   help="grid lower-bound estimator (for N beyond the exact cap)")
    p.add_argument("--grid", type=int, default=100)
    common(p)
    p.set_defaults(func=_cmd_discrepancy)

    p = sub.add_parser("render", help="SVG of the planar annular set")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        if args.subcommand == "discrepancy" and not args.points:
            if not (args.A and args.N):
                parser.error("discrepancy needs --points or --A with --N")
        if args.subcommand == "verify" and args.epsilon not in (None, "auto"):
            args.epsilon = float(args.epsilon)
        return args.func(args)
    except SystemExit as exc:  # argparse usage errors and --help/--version
        return int(exc.code or 0)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
