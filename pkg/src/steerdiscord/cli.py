"""Command-line entry point: ``steerdiscord <subcommand> ...``.

Exit codes: 0 success, 2 unreadable input, 3 non-physical state,
4 numeric failure or undefined quantity.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager

import numpy as np

from . import experiments
from .correlations import correlation_report
from .errors import (ExhaustedRejection, InvalidState, OptimizationFailure,
                     OutOfDomain, PureBobMarginal, SingularFilter)
from .sampling import Category, SamplerConfig, sample_category
from .state import StateFileError, load_state, to_canonical
from .steering import canonical_ellipsoid, max_distance

EXIT_PARSE, EXIT_NONPHYSICAL, EXIT_NUMERIC = 2, 3, 4


def fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path, header, rows, footer=None):
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
        for key, val in (footer or {}).items():
            fh.write(f"# {key}={fmt(val) if not isinstance(val, tuple) else ','.join(map(fmt, val))}\n")


def _direction(n):
    return {"n": n.n.tolist(), "theta": n.theta, "phi": n.phi}


def analyze_state(s):
    """JSON-ready report for one state."""
    ellipsoid = None
    try:
        center, semiaxes, axes = canonical_ellipsoid(to_canonical(s))
        ellipsoid = {"center": center.tolist(), "semiaxes": semiaxes.tolist(),
                     "axes": axes.tolist()}
    except SingularFilter:
        pass
    opt = max_distance(s)
    rep = correlation_report(s)
    return {
        "physical": True,
        "min_eigenvalue": s.min_eigenvalue,
        "x": s.x.tolist(), "y": s.y.tolist(), "T": s.T.tolist(),
        "canonical_ellipsoid": ellipsoid,
        "max_distance": {"value": opt.value, "branch": str(opt.branch),
                         "n_star": _direction(opt.n_star)},
        "mutual_info": rep.mutual_info,
        "classical_corr": rep.classical_corr,
        "discord": rep.discord,
        "q_star": rep.q_star,
        "n_discord": _direction(rep.n_discord),
        "n_star": _direction(rep.n_star),
    }


def cmd_analyze(args):
    s = load_state(args.file)
    json.dump(analyze_state(s), sys.stdout, indent=2)
    sys.stdout.write("\n")


def _parse_t(text):
    try:
        t = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise StateFileError(f"--t expects 't1,t2,t3', got {text!r}") from exc
    if len(t) != 3:
        raise StateFileError(f"--t expects three values, got {len(t)}")
    return t


def cmd_surface(args):
    rows, summary = experiments.surface(_parse_t(args.t), args.grid)
    write_csv(args.out, experiments.SURFACE_HEADER, rows,
              {"max_D2": summary["max_D2"], "min_entropy": summary["min_entropy"]})


def cmd_scatter(args):
    rows, summary = experiments.scatter(args.category, args.count, args.seed, args.workers)
    write_csv(args.out, experiments.SCATTER_HEADER, rows, summary)


def cmd_twoparam(args):
    rows, summary = experiments.twoparam(args.b, args.steps)
    footer = dict(summary)
    if footer["mismatch_interval"] is None:
        footer["mismatch_interval"] = "none"
    write_csv(args.out, experiments.TWOPARAM_HEADER, rows, footer)


def cmd_sample(args):
    states = sample_category(SamplerConfig(args.seed, args.category, args.count))
    with _output(args.out) as fh:
        for s in states:
            fh.write(json.dumps(s.to_dict()) + "\n")


def build_parser():
    p = argparse.ArgumentParser(prog="steerdiscord", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full report for a JSON state file")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    categories = [c.value for c in Category]

    s = sub.add_parser("surface", help="entropy and distance over (theta, phi)")
    s.add_argument("--t", required=True, help="Bell-diagonal correlations 't1,t2,t3'")
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_surface)

    c = sub.add_parser("scatter", help="discord vs. bound for sampled states")
    c.add_argument("--category", required=True, choices=categories)
    c.add_argument("--count", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_scatter)

    t = sub.add_parser("twoparam", help="sweep of the two-parameter family")
    t.add_argument("--b", type=float, required=True)
    t.add_argument("--steps", type=int, default=101)
    t.add_argument("--out", default="-")
    t.set_defaults(func=cmd_twoparam)

    m = sub.add_parser("sample", help="dump sampled states as JSON lines")
    m.add_argument("--category", required=True, choices=categories)
    m.add_argument("--count", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--out", default="-")
    m.set_defaults(func=cmd_sample)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidState as exc:
        print(f"error: non-physical state: {exc.invariant} ({exc})", file=sys.stderr)
        return EXIT_NONPHYSICAL
    except (OptimizationFailure, PureBobMarginal, ExhaustedRejection) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OutOfDomain as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return 0


if __name__ == "__main__":
    sys.exit(main())
