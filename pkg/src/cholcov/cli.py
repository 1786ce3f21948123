"""Command-line experiment harness.

Subcommands:
  simulate   replicated scenario runs writing results.csv / timings.csv
  classify   QDA evaluation of a labelled CSV dataset
  estimate   one-shot factor fit on a CSV, emitting matrix files
  verify     numerical oracles for the factor/regression identities
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import emit_matrix, ingest_csv
from .errors import CholcovError
from .experiments import (
    ExperimentConfig,
    run_classification,
    run_simulation,
)
from .linalg import sample_covariance, standardize
from .methods import METHODS, fit_method, fit_with_selection, normalize_method
from .relations import verify_appendix_a, verify_proposition1
from .simulate import RANDOM_SPARSE, ScenarioSpec

SEED_ENV = "CHOLCOV_SEED"


def _parse_methods(text: str) -> tuple[str, ...]:
    return tuple(normalize_method(m) for m in text.split(",") if m.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cholcov",
        description="Sparse Cholesky covariance factor estimation experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a replicated simulation scenario")
    sim.add_argument(
        "--scenario",
        required=True,
        choices=["ar1", "banded4", "dense05", "random_sparse"],
    )
    sim.add_argument(
        "--p", default="30,100", help="comma-separated matrix dimensions"
    )
    sim.add_argument("--n", type=int, default=200, help="sample size per replicate")
    sim.add_argument(
        "--density",
        type=int,
        default=2,
        help="nonzero proportion numerator i (pattern density i/p, random_sparse only)",
    )
    sim.add_argument("--methods", default=",".join(METHODS))
    sim.add_argument("--replicates", type=int, default=20)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--folds", type=int, default=5)
    sim.add_argument("--k-grid", default=None, help="comma-separated band values")
    sim.add_argument(
        "--lambda-grid", default=None, help="comma-separated penalty values"
    )
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--format", choices=["csv", "json"], default="csv")

    cla = sub.add_parser("classify", help="QDA evaluation on a labelled dataset")
    cla.add_argument("--data", required=True)
    cla.add_argument("--header", action="store_true", help="first row is a header")
    cla.add_argument(
        "--label-column",
        default="-1",
        help="label column index (negative from end) or header name",
    )
    cla.add_argument("--protocol", choices=["loocv", "split"], required=True)
    cla.add_argument("--split-fraction", type=float, default=0.5)
    cla.add_argument("--methods", default=",".join(METHODS))
    cla.add_argument("--seed", type=int, default=None)
    cla.add_argument("--folds", type=int, default=5)
    cla.add_argument("--out", required=True)
    cla.add_argument("--format", choices=["csv", "json"], default="csv")

    est = sub.add_parser("estimate", help="fit one factor on a CSV dataset")
    est.add_argument("--data", required=True)
    est.add_argument("--header", action="store_true")
    est.add_argument("--label-column", default=None)
    est.add_argument(
        "--class",
        dest="class_label",
        default=None,
        help="restrict to rows of this label",
    )
    est.add_argument("--method", required=True)
    est.add_argument(
        "--hyper",
        default=None,
        help="band k or penalty value; cross-validated when omitted",
    )
    est.add_argument("--folds", type=int, default=5)
    est.add_argument(
        "--raw", action="store_true", help="skip standardization of the data"
    )
    est.add_argument("--out", required=True, help="output directory")

    ver = sub.add_parser(
        "verify", help="run factor/regression identity oracles on random matrices"
    )
    ver.add_argument("--count", type=int, default=100)
    ver.add_argument("--p-min", type=int, default=2)
    ver.add_argument("--p-max", type=int, default=10)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--tol", type=float, default=1e-10)
    return parser


def _label_column(arg):
    if arg is None:
        return None
    try:
        return int(arg)
    except ValueError:
        return arg


def cmd_simulate(args) -> int:
    seed = _seed_from(args)
    for p in _parse_int_list(args.p):
        spec = ScenarioSpec(
            kind=args.scenario,
            p=p,
            n=args.n,
            density_num=args.density if args.scenario == RANDOM_SPARSE else 0,
            seed=seed,
        )
        out_dir = Path(args.out)
        if len(_parse_int_list(args.p)) > 1:
            out_dir = out_dir / f"p{p}"
        config = ExperimentConfig(
            methods=_parse_methods(args.methods),
            seed=seed,
            scenario=spec,
            replicates=args.replicates,
            folds=args.folds,
            k_grid=_parse_int_list(args.k_grid) if args.k_grid else None,
            lambda_grid=_parse_float_list(args.lambda_grid)
            if args.lambda_grid
            else None,
            out_dir=out_dir,
            emit_json=args.format == "json",
        )
        results = run_simulation(config)
        print(f"p={p}: wrote {len(results)} result rows to {out_dir}")
    return 0


def cmd_classify(args) -> int:
    data = ingest_csv(args.data, args.header, _label_column(args.label_column))
    config = ExperimentConfig(
        methods=_parse_methods(args.methods),
        seed=_seed_from(args),
        folds=args.folds,
        out_dir=Path(args.out),
        emit_json=args.format == "json",
    )
    rows = run_classification(data, config, args.protocol, args.split_fraction)
    for row in rows:
        print(
            f"{row['method']:>7} {row['class']!s:>18}"
            f"  tnr={row['tnr']:.3f} f1={row['f1']:.3f} acc={row['accuracy']:.3f}"
        )
    return 0


def cmd_estimate(args) -> int:
    data = ingest_csv(args.data, args.header, _label_column(args.label_column))
    class_tag = ""
    if args.class_label is not None:
        if data.labels is None:
            raise CholcovError("--class requires --label-column")
        keep = data.labels == args.class_label
        if not keep.any():
            raise CholcovError(f"no rows with label {args.class_label!r}")
        data = data.subset(keep)
        class_tag = args.class_label
    if not args.raw:
        data = standardize(data)
    values = data.values - data.values.mean(axis=0)
    method = normalize_method(args.method)
    if args.hyper is None:
        factor, hyper = fit_with_selection(method, values, args.folds)
    else:
        hyper = float(args.hyper) if method != "mband" else int(args.hyper)
        factor = fit_method(method, values, hyper)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = f"_{class_tag}" if class_tag else ""
    emit_matrix(
        factor.values,
        out_dir / f"factor_{method}{suffix}.csv",
        kind="factor",
        method=method,
        class_label=class_tag,
    )
    emit_matrix(
        factor.reconstruct(),
        out_dir / f"sigma_{method}{suffix}.csv",
        kind="sigma",
        method=method,
        class_label=class_tag,
    )
    emit_matrix(
        sample_covariance(values, center=False),
        out_dir / f"sigma_sample{suffix}.csv",
        kind="sigma",
        method="sample",
        class_label=class_tag,
    )
    print(f"{method}: hyperparameter {hyper}, matrices written to {out_dir}")
    return 0


def cmd_verify(args) -> int:
    rng = np.random.default_rng(_seed_from(args))
    worst_prop, worst_app = 0.0, 0.0
    for _ in range(args.count):
        p = int(rng.integers(args.p_min, args.p_max + 1))
        a = rng.standard_normal((p, 2 * p))
        sigma = a @ a.T / (2 * p) + 0.1 * np.eye(p)
        worst_prop = max(worst_prop, verify_proposition1(sigma))
        worst_app = max(worst_app, verify_appendix_a(sigma))
    ok = worst_prop <= args.tol and worst_app <= args.tol
    print(f"factor-regression identity: max deviation {worst_prop:.3e}")
    print(f"coefficient-update identity: max deviation {worst_app:.3e}")
    print("PASS" if ok else "FAIL", f"(tolerance {args.tol:g})")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "classify": cmd_classify,
        "estimate": cmd_estimate,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except CholcovError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
