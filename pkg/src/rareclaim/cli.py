"""Command-line front end: single evaluations, figure-family sweeps,
and the oracle verification suite.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 quadrature
did not converge (best-effort results are still emitted, flagged).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .model import Evidence, PriorSpec
from .oracle import simple_induction
from .output import (
    RunRecord,
    SweepSpec,
    format_sig,
    metadata_dict,
    parse_l_values,
    parse_n_grid,
    render_csv,
    render_json,
    render_svg_means,
    render_svg_posterior,
    write_text,
)
from .quadrature import QuadratureSpec
from .stats import posterior, posterior_means
from .verify import DEFAULT_SEED, run_checks

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--v-min", type=float, default=0.0, help="lower prior bound for the rare-event rate v")
    parser.add_argument("--v-max", type=float, default=1.0, help="upper prior bound for v")
    parser.add_argument("--d-min", type=float, default=0.0, help="lower prior bound for the testimony error rate d")
    parser.add_argument("--d-max", type=float, default=0.2, help="upper prior bound for d")
    parser.add_argument("--rel-tol", type=float, default=1e-9, help="target relative error per integral")
    parser.add_argument("--max-depth", type=int, default=60, help="maximum quadrature subdivision depth")
    parser.add_argument("--min-cell", type=float, default=1e-15, help="smallest quadrature cell edge relative to the box")
    parser.add_argument("--out", default=".", help="output directory for files")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="eval: stdout format; sweep: json adds a JSON file next to the CSV")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (verify only)")
    parser.add_argument("--config", default=None, help="JSON file whose keys mirror the flags; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rareclaim",
        description="Posterior belief in a rare-event claim from one supporting "
        "testimony and n uniform counter-testimonies",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"rareclaim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one (n, l) point", allow_abbrev=False)
    p_eval.add_argument("--n", type=int, default=None, help="testimonies for the common event (required here or in --config)")
    p_eval.add_argument("--l", type=int, default=0, help="known-false rare-event testimonies")
    p_eval.add_argument("--means", action="store_true", help="also report posterior means E[v], E[d]")
    p_eval.add_argument("--induction", action="store_true", help="also report the 1/(n+2) pure-induction value")
    _add_common(p_eval)

    p_sweep = sub.add_parser("sweep", help="sweep n (and l) and write CSV/JSON/SVG", allow_abbrev=False)
    p_sweep.add_argument("--n-grid", default=None, help="comma list of n values or geo:a:b:k shorthand (required here or in --config)")
    p_sweep.add_argument("--l", default="0", help="comma list of known-false counts (one curve per value)")
    p_sweep.add_argument("--means", action="store_true", help="add posterior-mean columns and chart")
    p_sweep.add_argument("--induction", action="store_true", help="add the 1/(n+2) column and curve")
    p_sweep.add_argument("--svg", action="store_true", help="also write SVG charts")
    _add_common(p_sweep)

    p_verify = sub.add_parser("verify", help="run the oracle verification suite", allow_abbrev=False)
    p_verify.add_argument("--quick", action="store_true", help="skip the Monte Carlo cross-check")
    p_verify.add_argument("--mc-samples", type=int, default=20_000, help="accepted samples per Monte Carlo combo")
    _add_common(p_verify)

    return parser


def _apply_config(args: argparse.Namespace, argv: list[str], parser: argparse.ArgumentParser) -> None:
    """Overlay values from --config for every flag not given on the
    command line. Config keys mirror flag names with dashes or
    underscores."""
    if not args.config:
        return
    try:
        with open(args.config, encoding="utf-8") as handle:
            config = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(config, dict):
        parser.error(f"config {args.config} must hold a JSON object")
    explicit = {
        token.split("=", 1)[0].lstrip("-").replace("-", "_")
        for token in argv
        if token.startswith("--")
    }
    for key, value in config.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            parser.error(f"config key {key!r} does not match any flag")
        if dest in explicit or dest == "config":
            continue
        setattr(args, dest, value)


def _prior_from(args: argparse.Namespace, parser: argparse.ArgumentParser) -> PriorSpec:
    try:
        return PriorSpec(v_lo=args.v_min, v_hi=args.v_max, d_lo=args.d_min, d_hi=args.d_max)
    except ValueError as exc:
        parser.error(str(exc))


def _qspec_from(args: argparse.Namespace, parser: argparse.ArgumentParser) -> QuadratureSpec:
    try:
        return QuadratureSpec(
            rel_tol=float(args.rel_tol),
            max_depth=int(args.max_depth),
            min_cell=float(args.min_cell),
        )
    except ValueError as exc:
        parser.error(str(exc))


def _compute_record(n: int, l: int, prior: PriorSpec, spec: QuadratureSpec,
                    want_means: bool, want_induction: bool) -> tuple[RunRecord, bool]:
    evidence = Evidence(n=n, l=l)
    result = posterior(evidence, prior, spec)
    converged = result.converged
    mean_v = mean_d = None
    if want_means:
        means = posterior_means(evidence, prior, spec)
        converged = converged and means.converged
        mean_v, mean_d = means.mean_v, means.mean_d
    record = RunRecord(
        n=n,
        l=l,
        p=result.p,
        p_err=result.abs_err,
        mean_v=mean_v,
        mean_d=mean_d,
        induction_p=simple_induction(n) if want_induction else None,
    )
    return record, converged


def cmd_eval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    prior = _prior_from(args, parser)
    spec = _qspec_from(args, parser)
    if args.n is None:
        parser.error("--n is required (flag or config)")
    if args.n < 0 or args.l < 0:
        parser.error("--n and --l must be nonnegative")
    record, converged = _compute_record(args.n, args.l, prior, spec, args.means, args.induction)
    meta = metadata_dict(prior, spec, __version__)
    if args.format == "json":
        payload = {
            "n": record.n,
            "l": record.l,
            "p": record.p,
            "p_err": record.p_err,
            "mean_v": record.mean_v,
            "mean_d": record.mean_d,
            "induction_p": record.induction_p,
            "converged": converged,
            "metadata": meta,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"n = {record.n}")
        print(f"l = {record.l}")
        print(f"p = {format_sig(record.p)}")
        print(f"p_err = {format_sig(record.p_err)}")
        if record.mean_v is not None:
            print(f"mean_v = {format_sig(record.mean_v)}")
            print(f"mean_d = {format_sig(record.mean_d)}")
        if record.induction_p is not None:
            print(f"induction_p = {format_sig(record.induction_p)}")
        print(f"converged = {str(converged).lower()}")
        for key, value in meta.items():
            print(f"# {key} = {value}")
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    prior = _prior_from(args, parser)
    spec = _qspec_from(args, parser)
    if args.n_grid is None:
        parser.error("--n-grid is required (flag or config)")
    try:
        sweep = SweepSpec(
            n_grid=parse_n_grid(str(args.n_grid)),
            l_values=parse_l_values(str(args.l)),
            include_means=args.means,
            include_induction=args.induction,
        )
    except ValueError as exc:
        parser.error(str(exc))
    records = []
    all_converged = True
    for l in sweep.l_values:  # record order: sorted by (l, n)
        for n in sweep.n_grid:
            record, converged = _compute_record(
                n, l, prior, spec, sweep.include_means, sweep.include_induction
            )
            records.append(record)
            all_converged = all_converged and converged
    meta = metadata_dict(prior, spec, __version__)
    single_curve = len(sweep.l_values) == 1
    family = "fig1" if single_curve else "fig3"
    means_family = "fig2" if single_curve else "fig4"
    out_dir = Path(args.out)
    written = [write_text(out_dir / f"{family}.csv", render_csv(records, meta))]
    if args.format == "json":
        written.append(write_text(out_dir / f"{family}.json", render_json(records, meta)))
    if args.svg:
        written.append(
            write_text(out_dir / f"{family}.svg", render_svg_posterior(records, meta))
        )
        if sweep.include_means:
            written.append(
                write_text(out_dir / f"{means_family}.svg", render_svg_means(records, meta))
            )
    for path in written:
        print(f"wrote {path}")
    if not all_converged:
        print("warning: some points did not reach the requested tolerance", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    results = run_checks(
        quick=args.quick,
        seed=args.seed,
        mc_samples=args.mc_samples,
        rel_tol=args.rel_tol,
    )
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    failed = [res for res in results if not res.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, argv, parser)
    if args.command == "eval":
        return cmd_eval(args, parser)
    if args.command == "sweep":
        return cmd_sweep(args, parser)
    return cmd_verify(args, parser)


def entry_point() -> None:
    sys.exit(main())
