"""The ``maccanon`` command line.

Subcommands:

* ``gen``: draw a random channel set and write it as JSON.
* ``solve``: run one of the four solvers on a channel file.
* ``trace``: trace a 2-user capacity-region boundary to CSV.
* ``study-timeshare``: sweep tone counts and loading factors to CSV.

Exit codes: 0 success, 2 invalid input, 3 infeasible (flag 0), 4 the
solver did not converge or decide.

"""

import argparse
import csv
import logging
import os
import sys
import time

from ._admission import adm_mac, trace_region_2user
from ._errors import NonConvergenceError, NumericalBreakdown, ValidationError
from ._model import ChannelSpec, generate_channel
from ._options import SolverOptions
from ._serialize import dumps, load_channel, save_report
from ._solvers import FLAG_INFEASIBLE, max_resmac, max_rmac, min_pmac
from ._study import STUDY_COLUMNS, timeshare_study
from ._tools import catch, leaves
from ._version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_STALLED = 4

SEED_VARIABLE = "MACCANON_SEED"

MODEL_CHOICES = {
    "iid": "iid_rayleigh",
    "kronecker": "kronecker_exponential",
}

# Error fields that correspond to a command-line flag.
FIELD_FLAGS = {
    "num_users": "--users",
    "rx_antennas": "--rx",
    "tx_antennas": "--tx",
    "num_tones": "--tones",
    "model": "--model",
    "rho_tx": "--rho-tx",
    "rho_rx": "--rho-rx",
    "taps": "--taps",
    "seed": "--seed",
    "c_b": "--real",
    "E": "--energies",
    "E_T": "--total-energy",
    "b": "--rates",
    "b_min": "--rates",
    "theta": "--weights",
    "w": "--weights",
    "U": "--channel",
    "grid_points": "--points",
    "workers": "--parallel",
}


def _default_seed():
    raw = os.environ.get(SEED_VARIABLE)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(
            "{} must be an integer, got {!r}".format(SEED_VARIABLE, raw),
            field=SEED_VARIABLE,
        )


def _flag_of(exc):
    field = getattr(exc, "field", None)
    if field is None:
        return None
    if field.startswith("H[") or field in ("N", "L_x", "L_y", "kind",
                                           "version", "dual"):
        return "--channel"
    return FIELD_FLAGS.get(field, field)


################################################################
# Argument parsing
################################################################


def build_parser():
    parser = argparse.ArgumentParser(
        prog="maccanon",
        description="Weighted rate and energy optimization for the "
        "MIMO multiple-access channel.",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + __version__
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress (-v info, -vv debug)",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    parallel = argparse.ArgumentParser(add_help=False)
    parallel.add_argument(
        "--parallel",
        type=int,
        default=os.cpu_count() or 1,
        metavar="K",
        help="worker threads (default: CPU count); results do not "
        "depend on it",
    )
    parallel.add_argument(
        "--seed", type=int, default=None,
        help="default: ${} or 0".format(SEED_VARIABLE),
    )

    energy = argparse.ArgumentParser(add_help=False)
    energy.add_argument(
        "--energies", type=float, nargs="+", metavar="E",
        help="per-user energy budgets (one value applies to all users)",
    )
    energy.add_argument(
        "--snr-db", type=float, default=15.0,
        help="used when no budget is given: E_u = N * 10**(snr/10) "
        "(default: 15)",
    )

    gen = sub.add_parser("gen", help="draw a random channel set")
    gen.add_argument("--users", type=int, default=4)
    gen.add_argument("--rx", type=int, default=4)
    gen.add_argument("--tx", type=int, nargs="+", default=[2],
                     help="transmit antennas (one value or one per user)")
    gen.add_argument("--tones", type=int, default=16)
    gen.add_argument("--model", choices=sorted(MODEL_CHOICES),
                     default="iid")
    gen.add_argument("--rho-tx", type=float, default=0.0)
    gen.add_argument("--rho-rx", type=float, default=0.0)
    gen.add_argument("--taps", type=int, default=1)
    gen.add_argument("--real", action="store_true",
                     help="real baseband signals (c_b = 2)")
    gen.add_argument("--seed", type=int, default=None,
                     help="default: ${} or 0".format(SEED_VARIABLE))
    gen.add_argument("-o", "--output", help="file (default: stdout)")
    gen.set_defaults(handler=cmd_gen)

    solve = sub.add_parser("solve", parents=[parallel, energy],
                           help="run a solver on a channel file")
    solve.add_argument(
        "problem", choices=["maxrmac", "minpmac", "maxresmac", "admmac"]
    )
    solve.add_argument("--channel", required=True)
    solve.add_argument("--total-energy", type=float,
                       help="sum budget for maxresmac (default: U times "
                       "the per-user SNR energy)")
    solve.add_argument("--rates", type=float, nargs="+",
                       help="rate targets (minpmac, admmac)")
    solve.add_argument(
        "--weights", type=float, nargs="+", default=[1.0],
        help="rate weights theta, or energy weights w for minpmac",
    )
    solve.add_argument("-o", "--output", help="report file")
    solve.set_defaults(handler=cmd_solve)

    trace = sub.add_parser("trace", parents=[parallel, energy],
                           help="trace a 2-user region boundary")
    trace.add_argument("--channel", required=True)
    trace.add_argument("--points", type=int, default=81)
    trace.add_argument("--tol", type=float, default=1e-3,
                       help="bisection width in bits (default: 1e-3)")
    trace.add_argument("-o", "--output", help="CSV file (default: stdout)")
    trace.set_defaults(handler=cmd_trace)

    study = sub.add_parser("study-timeshare", parents=[parallel],
                           help="how often time sharing is needed")
    study.add_argument("--tones", type=int, nargs="+",
                       default=[1, 4, 16, 64])
    study.add_argument("--rhos", type=float, nargs="+",
                       default=[0.85, 0.95, 0.99])
    study.add_argument("--trials", type=int, default=100)
    study.add_argument("--snr-db", type=float, default=10.0)
    study.add_argument("--users", type=int, default=3)
    study.add_argument("--rx", type=int, default=2)
    study.add_argument("--tx", type=int, default=1)
    study.add_argument("-o", "--output", help="CSV file (default: stdout)")
    study.set_defaults(handler=cmd_study_timeshare)
    return parser


def _seed(args):
    return _default_seed() if args.seed is None else args.seed


def _options(args):
    return SolverOptions(workers=args.parallel, seed=_seed(args))


def _energies(args, ch):
    if args.energies is not None:
        return _scalar_or_list(args.energies)
    return ch.num_tones * 10 ** (args.snr_db / 10)


def _scalar_or_list(values):
    return values[0] if len(values) == 1 else values


def _open_output(path):
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


################################################################
# Subcommands
################################################################


def cmd_gen(args):
    spec = ChannelSpec(
        num_users=args.users,
        rx_antennas=args.rx,
        tx_antennas=_scalar_or_list(args.tx),
        num_tones=args.tones,
        c_b=2 if args.real else 1,
        model=MODEL_CHOICES[args.model],
        rho_tx=args.rho_tx,
        rho_rx=args.rho_rx,
        taps=args.taps,
        seed=_seed(args),
    )
    ch = generate_channel(spec)
    if args.output is None:
        sys.stdout.write(dumps(ch))
    else:
        save_report(args.output, ch)
        print("wrote {!r} to {}".format(ch, args.output))
    return EXIT_OK


def _summary(report, seconds):
    lines = [
        "problem     {}".format(report.problem),
        "flag        {}".format(report.flag),
        "objective   {:.10g}".format(report.objective),
        "iterations  {}".format(report.iterations),
    ]
    if len(report.allocations) > 1:
        lines.append("alpha       {}".format(
            " ".join("{:.6g}".format(a) for a in report.alpha)))
    lines.append("user        rate          energy")
    for u, (rate, energy) in enumerate(zip(report.rates, report.energies)):
        lines.append("{:<11} {:<13.8g} {:.8g}".format(u, rate, energy))
    lines.append("wall time   {:.3f} s".format(seconds))
    return "\n".join(lines)


def _run_solver(args, ch, options):
    weights = _scalar_or_list(args.weights)
    if args.problem == "maxrmac":
        return max_rmac(ch, _energies(args, ch), weights, options)
    if args.problem == "maxresmac":
        total = args.total_energy
        if total is None:
            total = ch.num_users * ch.num_tones * 10 ** (args.snr_db / 10)
        return max_resmac(ch, total, weights, options)
    if args.rates is None:
        raise ValidationError(
            "{} needs rate targets".format(args.problem), field="b"
        )
    rates = _scalar_or_list(args.rates)
    if args.problem == "minpmac":
        return min_pmac(ch, rates, weights, options)
    return adm_mac(ch, rates, _energies(args, ch), options)


def cmd_solve(args):
    ch = load_channel(args.channel)
    options = _options(args)
    started = time.perf_counter()
    try:
        report = _run_solver(args, ch, options)
    except NonConvergenceError as exc:
        if args.output is not None and exc.best is not None:
            save_report(args.output, exc.best)
            logger.info("wrote best iterate to %s", args.output)
        raise
    seconds = time.perf_counter() - started
    if args.output is not None:
        save_report(args.output, report)
    print(_summary(report, seconds))
    return EXIT_INFEASIBLE if report.flag == FLAG_INFEASIBLE else EXIT_OK


def _fmt(value):
    return repr(float(value))


def cmd_trace(args):
    ch = load_channel(args.channel)
    started = time.perf_counter()
    region = trace_region_2user(
        ch,
        _energies(args, ch),
        grid_points=args.points,
        options=_options(args),
        tol=args.tol,
    )
    seconds = time.perf_counter() - started
    handle = _open_output(args.output)
    try:
        for corner in region.corners:
            handle.write("# corner,{},{}\n".format(*map(_fmt, corner)))
        handle.write("# single_user,{},{}\n".format(
            *map(_fmt, region.single_user)))
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["b1", "b2"])
        for b1, b2 in zip(region.b1, region.b2):
            writer.writerow([_fmt(b1), _fmt(b2)])
    finally:
        if handle is not sys.stdout:
            handle.close()
    if args.output is not None:
        print("traced {} points ({} undecided probes) in {:.3f} s".format(
            len(region.b1), region.undecided, seconds))
    return EXIT_OK


def cmd_study_timeshare(args):
    started = time.perf_counter()
    cells = timeshare_study(
        args.tones,
        args.rhos,
        args.trials,
        snr_db=args.snr_db,
        seed=_seed(args),
        users=args.users,
        rx_antennas=args.rx,
        tx_antennas=args.tx,
        options=_options(args),
    )
    seconds = time.perf_counter() - started
    handle = _open_output(args.output)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(STUDY_COLUMNS)
        for cell in cells:
            writer.writerow(
                "" if value is None else value for value in cell.row()
            )
    finally:
        if handle is not sys.stdout:
            handle.close()
    if args.output is not None:
        print("{} cells in {:.3f} s".format(len(cells), seconds))
    return EXIT_OK


################################################################
# Entry point
################################################################


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity,
                                                      logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv=None):
    """Run the command line; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    if getattr(args, "parallel", 1) < 1:
        parser.error("--parallel must be >= 1")

    status = []

    def invalid(exc):
        for leaf in leaves(exc):
            flag = _flag_of(leaf)
            prefix = "{}: ".format(flag) if flag else ""
            print("maccanon: error: {}{}".format(prefix, leaf),
                  file=sys.stderr)
        status.append(EXIT_INVALID)

    def stalled(exc):
        for leaf in leaves(exc):
            print("maccanon: {}".format(leaf), file=sys.stderr)
        status.append(EXIT_STALLED)

    try:
        with catch((NonConvergenceError, NumericalBreakdown), stalled):
            with catch(ValidationError, invalid):
                status.append(args.handler(args))
    except OSError as exc:
        print("maccanon: error: {}".format(exc), file=sys.stderr)
        return EXIT_INVALID
    return status[0]
