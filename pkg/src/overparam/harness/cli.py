"""Command line: ``sweep``, ``check``, ``spectrum`` and ``fourier``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .. import __version__
from ..ensembles import BiLevel, Isotropic, PolyDecay, build_spectrum
from ..errors import OverparamError
from ..fourier import (
    alias_frequencies,
    bilevel_design,
    bilevel_fourier_design,
    closed_form_alias,
    cos_column,
    fourier_cls_upper_bound,
    fourier_test_error,
    regular_grid,
    weighted_min_norm,
)
from ..theory import classify_regime
from .config import load_config
from .runner import read_csv, run_to_csv, verdict


def _print_rules(results) -> bool:
    ok = True
    for rule in results:
        print(f"{'PASS' if rule.passed else 'FAIL'}  {rule.name}: {rule.detail}")
        ok = ok and rule.passed
    return ok


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.out is not None:
        overrides["output_path"] = args.out
    if overrides:
        config = dataclasses.replace(config, **overrides)
    path = run_to_csv(config, threads=args.threads)
    print(f"wrote {path}")
    _print_rules(verdict(config, read_csv(path)))
    return 0


def cmd_check(args) -> int:
    config = load_config(args.config)
    if args.trials is not None:
        config = dataclasses.replace(config, trials=args.trials)
    return 0 if _print_rules(verdict(config, read_csv(args.results))) else 1


def cmd_spectrum(args) -> int:
    if args.variant == "isotropic":
        spec = Isotropic(args.n, args.d)
    elif args.variant == "bilevel":
        spec = BiLevel(args.n, args.p, args.q, args.r)
    else:
        spec = PolyDecay(args.n, args.d, args.m)
    lam = build_spectrum(spec).lambdas
    summary = {
        "ensemble": args.variant,
        "d": int(lam.size),
        "trace": float(lam.sum()),
        "largest": float(lam[0]),
        "smallest": float(lam[-1]),
        "distinct_levels": int(np.unique(lam).size),
    }
    if isinstance(spec, BiLevel):
        summary["favored"] = spec.dims[1]
        verdict_ = classify_regime(spec.p, spec.q, spec.r)
        summary["regime"] = verdict_.regime.value
        summary["q_thresholds"] = [verdict_.q_low, verdict_.q_high]
    print(json.dumps(summary, indent=2))
    if args.full:
        for v in lam:
            print("%.17g" % v)
    return 0


def cmd_fourier(args) -> int:
    if args.p is not None:
        if args.q is None or args.r is None:
            raise SystemExit("fourier: --p needs --q and --r")
        design = bilevel_fourier_design(args.n, args.p, args.q, args.r)
    else:
        if args.d is None or args.lambda_h is None:
            raise SystemExit("fourier: give --d and --lambda-h, or --p/--q/--r")
        design = bilevel_design(args.n, args.d, args.favored, args.lambda_h)
    lambda_h = float(design.weights[0])
    coefs = weighted_min_norm(design, np.cos(regular_grid(design.n)))
    scale = math.sqrt(math.pi)
    plus, minus = alias_frequencies(design.n, design.d, 1)
    b_hat = [coefs[cos_column(k)] / scale for k in plus + minus]
    closed = closed_form_alias(design.n, design.d, lambda_h)
    report = {
        "n": design.n,
        "d": design.d,
        "lambda_h": lambda_h,
        "aliases": design.alias_count,
        "closed_form": {"a": closed.a, "b": closed.b, "sigma_cn": closed.sigma_cn},
        "measured": {"a": coefs[cos_column(1)] / scale, "b_min": min(b_hat), "b_max": max(b_hat)},
    }
    if args.p is not None:
        report["regime"] = classify_regime(args.p, args.q, args.r).regime.value
        eps = (args.p - 1.0) / 2.0 - (args.q - (1.0 - args.r))
        report["cls_upper_bound"] = fourier_cls_upper_bound(args.p, args.q, args.r, args.n) if eps > 0 else None
    if args.n_test:
        report["err_hat"] = fourier_test_error(design, coefs, args.n_test, args.seed)
    print(json.dumps(report, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="overparam",
        description="Monte-Carlo sweeps comparing min-norm interpolation and the hard-margin SVM.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a configured sweep and write CSV")
    sweep.add_argument("config")
    sweep.add_argument("--seed", type=int, help="override base_seed")
    sweep.add_argument("--trials", type=int, help="override trials per sweep value")
    sweep.add_argument("--threads", type=int, default=1)
    sweep.add_argument("--out", help="override output_path")
    sweep.set_defaults(func=cmd_sweep)

    check = sub.add_parser("check", help="evaluate pass/fail rules on a results CSV")
    check.add_argument("config")
    check.add_argument("results")
    check.add_argument("--trials", type=int, help="trials the results were produced with")
    check.set_defaults(func=cmd_check)

    spectrum = sub.add_parser("spectrum", help="summarize an ensemble's eigenvalues")
    spectrum.add_argument("variant", choices=["isotropic", "bilevel", "polydecay"])
    spectrum.add_argument("--n", type=int, required=True)
    spectrum.add_argument("--d", type=int)
    spectrum.add_argument("--p", type=float)
    spectrum.add_argument("--q", type=float)
    spectrum.add_argument("--r", type=float)
    spectrum.add_argument("--m", type=float)
    spectrum.add_argument("--full", action="store_true", help="also print every eigenvalue")
    spectrum.set_defaults(func=cmd_spectrum)

    fourier = sub.add_parser("fourier", help="alias closed form versus weighted interpolation")
    fourier.add_argument("--n", type=int, required=True)
    fourier.add_argument("--d", type=int)
    fourier.add_argument("--lambda-h", type=float)
    fourier.add_argument("--favored", type=int, default=1)
    fourier.add_argument("--p", type=float)
    fourier.add_argument("--q", type=float)
    fourier.add_argument("--r", type=float)
    fourier.add_argument("--n-test", type=int, default=0)
    fourier.add_argument("--seed", type=int, default=0)
    fourier.set_defaults(func=cmd_fourier)
    return parser


_REQUIRED_BY_VARIANT = {"isotropic": ("d",), "bilevel": ("p", "q", "r"), "polydecay": ("d", "m")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "spectrum":
        missing = [k for k in _REQUIRED_BY_VARIANT[args.variant] if getattr(args, k) is None]
        if missing:
            parser.error(f"spectrum {args.variant} needs --{', --'.join(missing)}")
    try:
        return args.func(args)
    except (OverparamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
