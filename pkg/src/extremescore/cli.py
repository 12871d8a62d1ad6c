"""Command-line entry point: ``extremescore <subcommand> ...``.

Every output carries a reproduction record: a leading ``#`` line for CSV,
a ``_meta`` object for JSON. Exit codes: 0 ok, 1 internal error, 2 usage
or configuration error, 3 resource guard violation.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .asymptotics import thresholds
from .distributions import mean_variance, parse_distribution
from .engine import simulate_degree_only, write_score_vector
from .errors import ConfigError, ExtremeScoreError, GuardViolation
from .experiments import ExperimentConfig, convergence_sweep, estimate_top_k_distinct, write_csv
from .oracle import enumerate_exact
from .rng import RandomStream
from .statistics import scale_threshold
from .tilting import bound_table, exact_pmf, exact_pmf_rational

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _default_workers() -> int:
    env = os.environ.get("EXTREMESCORE_WORKERS")
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"EXTREMESCORE_WORKERS must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="extremescore", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--dist", help="m1, draw:P or a JSON distribution file (default m1)")
        sp.add_argument("--out", help="output file (default stdout)")

    sp = sub.add_parser("dist", help="validate a distribution and print its moments")
    common(sp)

    sp = sub.add_parser("threshold", help="solve x, t and l for (n, k, delta)")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--x", type=float, help="use this x instead of solving")

    sp = sub.add_parser("pmf", help="exact pmf of a sum of m match scores (CSV)")
    common(sp)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--rational", action="store_true", help="exact rational masses")

    sp = sub.add_parser("bound", help="tied-pair expectation bound table (CSV)")
    common(sp)
    sp.add_argument("--n", type=_int_list, required=True, help="player counts, e.g. 500,1000,2000")
    sp.add_argument("--k", type=int, help="fixed k (default: schedule)")
    sp.add_argument("--c", type=float, default=1.0, help="schedule damping")
    sp.add_argument("--delta", type=float, default=0.1)

    sp = sub.add_parser("exact", help="exact enumeration report (JSON)")
    common(sp)
    sp.add_argument("--n", type=int, required=True)

    for name, helptext in (("estimate", "Monte Carlo estimate at one n"), ("sweep", "estimates over an n grid")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--config", help="JSON experiment config; flags below override it")
        if name == "estimate":
            sp.add_argument("--n", type=int)
        else:
            sp.add_argument("--n-grid", type=_int_list)
        sp.add_argument("--k", type=int, help="fixed k (default: schedule)")
        sp.add_argument("--c", type=float, help="schedule damping (default 1)")
        sp.add_argument("--delta", type=float)
        sp.add_argument("--threshold", choices=("solved", "explicit", "none"))
        sp.add_argument("--t", type=float, help="explicit threshold, unscaled")
        sp.add_argument("--replications", "-R", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, help="default $EXTREMESCORE_WORKERS or 1")
        sp.add_argument("--timing", action="store_true", help="fill elapsed_ms (output no longer byte-reproducible)")

    sp = sub.add_parser("simulate", help="dump one simulated score vector")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream-id", type=int, default=0)
    sp.add_argument("--t", type=float, help="also report Z for this unscaled threshold on stderr")
    return p


def _meta(args: argparse.Namespace, extra: dict[str, Any] | None = None) -> dict[str, Any]:
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    out = {"version": __version__, "args": flags}
    if extra:
        out.update(extra)
    return out


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _dump_json(fh, payload: dict[str, Any]) -> None:
    json.dump(payload, fh, indent=2)
    fh.write("\n")


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{args.config}: {exc}") from exc
    overrides = {
        "dist": args.dist,
        "k": args.k, "c": args.c, "delta": args.delta, "threshold_mode": args.threshold,
        "t": args.t, "replications": args.replications, "seed": args.seed, "workers": args.workers,
    }
    if args.command == "estimate" and args.n is not None:
        overrides["n_grid"] = [args.n]
    if args.command == "sweep" and args.n_grid is not None:
        overrides["n_grid"] = args.n_grid
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.t is not None and args.threshold is None:
        data.setdefault("threshold_mode", "explicit")
    data.setdefault("workers", _default_workers())
    if "n_grid" not in data:
        raise ConfigError("no player count given (--n / --n-grid or config n_grid)")
    if args.command == "estimate" and len(data["n_grid"]) != 1:
        raise ConfigError("estimate takes exactly one n")
    return ExperimentConfig.from_dict(data)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ExtremeScoreError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - report, never traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _dispatch(args: argparse.Namespace) -> int:
    cmd = args.command
    if cmd not in ("estimate", "sweep"):
        args.dist = args.dist or "m1"
        d = parse_distribution(args.dist)

    if cmd == "dist":
        mu, var = mean_variance(d)
        payload = {"_meta": _meta(args), **d.to_dict(), "exact": d.exact, "mean": _frac(mu),
                   "variance": _frac(var), "sigma": d.sigma}
        with _output(args.out) as fh:
            _dump_json(fh, payload)

    elif cmd == "threshold":
        res = thresholds(args.n, args.k, args.delta, d, x=args.x)
        with _output(args.out) as fh:
            _dump_json(fh, {"_meta": _meta(args), **res.to_dict()})

    elif cmd == "pmf":
        masses = exact_pmf_rational(d, args.m) if args.rational else exact_pmf(d, args.m).mass.tolist()
        with _output(args.out) as fh:
            fh.write("# " + json.dumps(_meta(args), sort_keys=True) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["support", "value", "mass"])
            for s, p in enumerate(masses):
                w.writerow([s, _frac(Fraction(s, d.denominator)), _frac(p) if args.rational else repr(p)])

    elif cmd == "bound":
        rows = bound_table(d, args.n, delta=args.delta, k=args.k, c=args.c)
        with _output(args.out) as fh:
            fh.write("# " + json.dumps(_meta(args), sort_keys=True) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "k", "t", "bound", "bound_normalized"])
            for r in rows:
                w.writerow([r["n"], r["k"], repr(r["t"]), repr(r["bound"]), repr(r["bound_normalized"])])

    elif cmd == "exact":
        report = enumerate_exact(d, args.n)
        with _output(args.out) as fh:
            _dump_json(fh, {"_meta": _meta(args), **report.to_dict()})

    elif cmd in ("estimate", "sweep"):
        cfg = _experiment_config(args)
        if cmd == "estimate":
            n = cfg.n_grid[0]
            results = [estimate_top_k_distinct(cfg, n, cfg.k_for(n))]
        else:
            results = convergence_sweep(cfg)
        with _output(args.out) as fh:
            write_csv(fh, results, _meta(args, {"config": cfg.to_dict()}), timing=args.timing)

    elif cmd == "simulate":
        stream = RandomStream(args.seed, args.stream_id)
        t_scaled = -1 if args.t is None else scale_threshold(args.t, d.denominator)
        v, z = simulate_degree_only(d, args.n, stream, t_scaled)
        with _output(args.out) as fh:
            write_score_vector(fh, v, args.seed, args.stream_id)
        if args.t is not None:
            print(f"Z={z}", file=sys.stderr)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
