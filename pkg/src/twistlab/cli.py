"""Command-line entry points.

Subcommands: ``estimate <map>`` (single-dimension estimator battery),
``sweep <map>`` (dimension sweep), ``verify`` (the full verification
suite), ``report <path>`` (summarize a saved JSON bundle).  Exit code 0
means every exact check passed and no estimator diverged.
"""

from __future__ import annotations

import argparse
import sys

from .acceptance import run_all
from .catalog import CATALOG
from .errors import TwistlabError
from .report import (
    ExperimentConfig,
    ReportBundle,
    Tolerances,
    config_from_ini,
    load_bundle_dict,
    run_suite,
    serialize,
)


def _add_experiment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("map", choices=sorted(CATALOG), help="registered map name")
    sub.add_argument("--dims", default=None,
                     help="comma-separated increasing dimensions, e.g. 16,64,256")
    sub.add_argument("--samples", type=int, default=None, help="samples per estimator")
    sub.add_argument("--seed", type=int, default=None, help="random seed")
    sub.add_argument("--sampler", choices=("gaussian", "structured", "both"),
                     default=None)
    sub.add_argument("--config", default=None,
                     help="key/value config file ([experiment] and [tolerances])")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", default=None, help="output path for the bundle")


def _build_config(args, single_dim: bool) -> ExperimentConfig:
    if args.config:
        cfg = config_from_ini(args.config, map_name=args.map)
    else:
        cfg = ExperimentConfig(map_name=args.map)
    dims = cfg.dims
    if args.dims:
        dims = tuple(int(v) for v in args.dims.replace(",", " ").split())
    if single_dim:
        dims = dims[:1]
    return ExperimentConfig(
        map_name=args.map,
        dims=dims,
        samples=args.samples if args.samples is not None else cfg.samples,
        seed=args.seed if args.seed is not None else cfg.seed,
        sampler=args.sampler if args.sampler is not None else cfg.sampler,
        tolerances=cfg.tolerances,
    )


def _print_bundle(bundle: ReportBundle) -> None:
    for check in bundle.checks:
        status = "ok " if check.passed else "FAIL"
        print(f"  [{status}] {check.name}@{check.dim}  dev={check.max_deviation:.3e}"
              + (f"  ({check.detail})" if check.detail else ""))
    for rep in bundle.reports:
        print(f"  [est] {rep.statistic}@{rep.dim}  sup={rep.sup_value:.6g}  "
              f"N={rep.samples} seed={rep.seed}")
    for failure in bundle.failures:
        print(f"  [DIVERGED] {failure}")


def _run_and_emit(args, single_dim: bool) -> int:
    cfg = _build_config(args, single_dim=single_dim)
    bundle = run_suite(cfg)
    _print_bundle(bundle)
    if args.out:
        path = serialize(bundle, args.format, args.out)
        print(f"wrote {args.format} bundle to {path}")
    return 0 if bundle.ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="twistlab",
        description="numerical experiments on quasilinear maps and twisted sums")
    subs = parser.add_subparsers(dest="command", required=True)

    est = subs.add_parser("estimate", help="run the estimator battery at one dimension")
    _add_experiment_flags(est)
    swp = subs.add_parser("sweep", help="run the estimator battery across dimensions")
    _add_experiment_flags(swp)
    subs.add_parser("verify", help="run the full verification suite")
    rep = subs.add_parser("report", help="summarize a saved JSON bundle")
    rep.add_argument("path", help="path to a JSON bundle")

    args = parser.parse_args(argv)
    try:
        if args.command == "estimate":
            return _run_and_emit(args, single_dim=True)
        if args.command == "sweep":
            return _run_and_emit(args, single_dim=False)
        if args.command == "verify":
            results = run_all(printer=print)
            failed = [r for r in results if not r.passed]
            print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
            return 0 if not failed else 1
        if args.command == "report":
            data = load_bundle_dict(args.path)
            cfg = data.get("config", {})
            print(f"map={cfg.get('map')} dims={cfg.get('dims')} "
                  f"samples={cfg.get('samples')} seed={cfg.get('seed')}")
            for check in data.get("checks", []):
                status = "ok " if check["passed"] else "FAIL"
                print(f"  [{status}] {check['name']}@{check['dim']}  "
                      f"dev={check['max_deviation']:.3e}")
            for report in data.get("reports", []):
                print(f"  [est] {report['statistic']}@{report['dim']}  "
                      f"sup={report['sup_value']:.6g}")
            for failure in data.get("failures", []):
                print(f"  [DIVERGED] {failure}")
            bad = [c for c in data.get("checks", []) if not c["passed"]]
            return 0 if not bad and not data.get("failures") else 1
    except TwistlabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
