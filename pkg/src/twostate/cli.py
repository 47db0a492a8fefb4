"""Command-line surface: simulate chains, export run and funnel curves,
fit scatter datasets and run-length curves.

Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible fit.
The TWOSTATE_SEED environment variable supplies the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .chain import MarkovParams, ParameterError
from .dataio import (
    AnalysisReport,
    DataFormatError,
    curve_text,
    fmt,
    funnel_table_text,
    parse_curve,
    parse_sequence,
    parse_studies,
    sequence_text,
    sha256_of,
    write_text_atomic,
)
from .estimate import (
    InfeasibleParametersError,
    RunFitConfig,
    fit_runs_mle,
    fit_runs_simulated,
    fit_scatter,
)
from .funnel import FunnelSpec, sample_curve, z_from_level
from .runs import average_and_normalize, extract_runs, memoryfree_curve
from .simulate import child_seed, generate


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _default_seed() -> int:
    return int(os.environ.get("TWOSTATE_SEED", "0"))


def _emit(text: str, out: str | None) -> None:
    if out:
        write_text_atomic(out, text)
    else:
        sys.stdout.write(text)


def _input_digest(**paths) -> dict:
    return {name: {"path": str(path), "sha256": sha256_of(path)} for name, path in paths.items()}


def _indexed_path(path: str, index: int) -> str:
    base, ext = os.path.splitext(path)
    return f"{base}_{index:03d}{ext}"


def cmd_simulate(args) -> int:
    params = MarkovParams(args.p, args.q, p1=args.p1)
    if args.count < 1:
        raise _UsageError("--count must be >= 1")
    for i in range(args.count):
        seed_i = args.seed if args.count == 1 else child_seed(args.seed, i)
        seq = generate(params, args.n, seed_i)
        out = None
        if args.out:
            out = args.out if args.count == 1 else _indexed_path(args.out, i)
        _emit(sequence_text(seq), out)
    return 0


def cmd_runs(args) -> int:
    simulated = args.p is not None or args.q is not None or args.n is not None
    if args.input and simulated:
        raise _UsageError("give either --input or the --p/--q/--n simulation flags, not both")
    if args.input:
        alphabet = tuple(args.alphabet.split(",")) if args.alphabet else None
        if alphabet and len(alphabet) != 2:
            raise _UsageError("--alphabet needs exactly two comma-separated symbols")
        sequences = [parse_sequence(args.input, alphabet=alphabet)]
    elif simulated:
        if args.p is None or args.q is None or args.n is None:
            raise _UsageError("simulation needs all of --p, --q and --n")
        params = MarkovParams(args.p, args.q)
        sequences = [generate(params, args.n, child_seed(args.seed, i)) for i in range(args.seeds)]
    else:
        raise _UsageError("give --input FILE or --p/--q/--n to simulate")

    hists = [extract_runs(seq) for seq in sequences]
    try:
        on_curve = average_and_normalize([ha for ha, _ in hists])
        off_curve = average_and_normalize([hb for _, hb in hists])
    except ParameterError as exc:
        raise DataFormatError(f"cannot build run curves: {exc}") from exc

    if args.out_on or args.out_off:
        if args.out_on:
            _emit(curve_text(on_curve), args.out_on)
        if args.out_off:
            _emit(curve_text(off_curve), args.out_off)
    else:
        sys.stdout.write("# state A (on) runs\n" + curve_text(on_curve))
        sys.stdout.write("# state B (off) runs\n" + curve_text(off_curve))

    if args.reference:
        n = len(sequences[0])
        p_bar = float(np.mean([seq.frequency for seq in sequences]))
        max_m = max(max(on_curve), max(off_curve))
        _emit(curve_text(memoryfree_curve(n, p_bar, max_m)), args.reference)
    return 0


def cmd_funnel(args) -> int:
    spec = FunnelSpec(args.pinf, args.nu, args.z)
    ns, lower, upper = sample_curve(spec, args.n_min, args.n_max, args.points)
    _emit(funnel_table_text(ns, lower, upper), args.out)
    return 0


def _fit_scatter_checked(dataset, args):
    if not 0.0 < args.level < 1.0:
        raise _UsageError(f"--level must lie strictly inside (0, 1), got {args.level}")
    # the dataset is already well-formed here, so any parameter complaint
    # (e.g. too few points for the quantile) is a shortcoming of the data
    try:
        return fit_scatter(dataset, level=args.level, min_p=args.min_p, min_q=args.min_q)
    except ParameterError as exc:
        raise DataFormatError(str(exc)) from exc


def cmd_fit_scatter(args) -> int:
    dataset = parse_studies(args.studies)
    fit = _fit_scatter_checked(dataset, args)
    report = AnalysisReport.build(
        command="fit-scatter",
        version=__version__,
        seed=None,
        inputs=_input_digest(studies=args.studies),
        scatter_fit=fit,
        details={"level": args.level, "min_p": args.min_p, "min_q": args.min_q},
    )
    _emit(report.to_json(), args.out)
    return 0


def cmd_fit_runs(args) -> int:
    on_curve = parse_curve(args.on)
    off_curve = parse_curve(args.off)
    config = RunFitConfig(
        grid_step=args.grid, refine_step=args.refine, floor=args.floor, length=args.length
    )
    fit = fit_runs_simulated(on_curve, off_curve, config)
    details = {
        "grid_step": args.grid,
        "refine_step": args.refine,
        "floor": args.floor,
        "length": args.length,
    }
    seed = None
    if args.confirm_seeds > 0:
        # Monte Carlo confirmation: simulate at the fitted parameters and
        # re-estimate by per-state run-length MLE
        seed = args.seed
        params = MarkovParams(fit.p11_hat, fit.p22_hat)
        hists = [
            extract_runs(generate(params, args.length, child_seed(seed, i)))
            for i in range(args.confirm_seeds)
        ]
        on_total = sum(ha.occupied_length for ha, _ in hists)
        on_runs = sum(ha.n_runs for ha, _ in hists)
        off_total = sum(hb.occupied_length for _, hb in hists)
        off_runs = sum(hb.n_runs for _, hb in hists)
        details["mc_confirmation"] = {
            "seeds": args.confirm_seeds,
            "mle_p11": (on_total - on_runs) / on_total,
            "mle_p22": (off_total - off_runs) / off_total,
        }
    report = AnalysisReport.build(
        command="fit-runs",
        version=__version__,
        seed=seed,
        inputs=_input_digest(on=args.on, off=args.off),
        run_fit=fit,
        run_curves={"on": on_curve, "off": off_curve},
        details=details,
    )
    _emit(report.to_json(), args.out)
    return 0


def cmd_analyze(args) -> int:
    dataset = parse_studies(args.studies)
    fit = _fit_scatter_checked(dataset, args)
    spec = FunnelSpec(fit.pinf_hat, fit.nu_hat, z_from_level(args.level))
    ns, lower, upper = sample_curve(spec, args.n_min, args.n_max, args.points)
    report = AnalysisReport.build(
        command="analyze",
        version=__version__,
        seed=None,
        inputs=_input_digest(studies=args.studies),
        scatter_fit=fit,
        funnel_curve={
            "n": ns.tolist(),
            "lower": np.clip(lower, 0.0, 1.0).tolist(),
            "upper": np.clip(upper, 0.0, 1.0).tolist(),
        },
        details={"level": args.level, "min_p": args.min_p, "min_q": args.min_q},
    )
    _emit(report.to_json(), args.out)
    return 0


def _add_scatter_fit_flags(sub):
    sub.add_argument("--studies", required=True, help="study table (study_id, n, successes|p_bar[, group])")
    sub.add_argument("--level", type=float, default=0.95)
    sub.add_argument("--min-p", type=float, default=None, help="lower bound projected onto p")
    sub.add_argument("--min-q", type=float, default=None, help="lower bound projected onto q")
    sub.add_argument("--out", default=None, help="report path (stdout when omitted)")


def build_parser() -> _Parser:
    parser = _Parser(prog="twostate", description=__doc__)
    parser.add_argument("--version", action="version", version=f"twostate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate seeded chain sequences")
    p_sim.add_argument("--p", type=float, required=True)
    p_sim.add_argument("--q", type=float, required=True)
    p_sim.add_argument("--p1", type=float, default=None, help="initial A probability (default: stationary)")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=_default_seed())
    p_sim.add_argument("--count", type=int, default=1, help="number of independent sequences")
    p_sim.add_argument("--out", default=None, help="output path; indexed when --count > 1")
    p_sim.set_defaults(func=cmd_simulate)

    p_runs = sub.add_parser("runs", help="normalized run-length curves per state")
    p_runs.add_argument("--input", default=None, help="sequence file to analyze")
    p_runs.add_argument("--alphabet", default=None, help="two comma-separated symbols for A,B")
    p_runs.add_argument("--p", type=float, default=None)
    p_runs.add_argument("--q", type=float, default=None)
    p_runs.add_argument("--n", type=int, default=None)
    p_runs.add_argument("--seeds", type=int, default=10, help="sequences to average when simulating")
    p_runs.add_argument("--seed", type=int, default=_default_seed())
    p_runs.add_argument("--out-on", default=None, help="state-A curve path")
    p_runs.add_argument("--out-off", default=None, help="state-B curve path")
    p_runs.add_argument("--reference", default=None, help="also write the memory-free expectation curve")
    p_runs.set_defaults(func=cmd_runs)

    p_fun = sub.add_parser("funnel", help="confidence-interval curve samples")
    p_fun.add_argument("--pinf", type=float, required=True)
    p_fun.add_argument("--nu", type=float, required=True)
    p_fun.add_argument("--z", type=float, default=1.96)
    p_fun.add_argument("--n-min", type=float, default=10.0)
    p_fun.add_argument("--n-max", type=float, default=1e5)
    p_fun.add_argument("--points", type=int, default=200)
    p_fun.add_argument("--out", default=None)
    p_fun.set_defaults(func=cmd_funnel)

    p_fsc = sub.add_parser("fit-scatter", help="fit (pinf, nu, p, q) to a study table")
    _add_scatter_fit_flags(p_fsc)
    p_fsc.set_defaults(func=cmd_fit_scatter)

    p_frn = sub.add_parser("fit-runs", help="fit (p11, p22) to run-length curves")
    p_frn.add_argument("--on", required=True, help="state-A (on) curve file")
    p_frn.add_argument("--off", required=True, help="state-B (off) curve file")
    p_frn.add_argument("--grid", type=float, default=0.05)
    p_frn.add_argument("--refine", type=float, default=0.01)
    p_frn.add_argument("--floor", type=float, default=1e-4)
    p_frn.add_argument("--length", type=int, default=10_000, help="sequence length assumed by the model curves")
    p_frn.add_argument("--confirm-seeds", type=int, default=0, help="Monte Carlo confirmation sequences")
    p_frn.add_argument("--seed", type=int, default=_default_seed())
    p_frn.add_argument("--out", default=None)
    p_frn.set_defaults(func=cmd_fit_runs)

    p_ana = sub.add_parser("analyze", help="fit-scatter plus funnel curve samples")
    _add_scatter_fit_flags(p_ana)
    p_ana.add_argument("--n-min", type=float, default=10.0)
    p_ana.add_argument("--n-max", type=float, default=1e5)
    p_ana.add_argument("--points", type=int, default=200)
    p_ana.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return exc.code or 0
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleParametersError as exc:
        print(f"infeasible fit: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
