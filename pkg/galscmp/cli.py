# cli.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Command line entry point.

Exit status is 0 on success, 1 for invalid input (including failed
``reproduce-paper`` checks) and 2 for any other error.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import argparse
import io
import logging
import os
import sys

from .core import (ConfigError, SweepError, ValidationError, format_frequency)
from .engine import GraphOrigin, Scenario, check_scenario, run
from .experiments import (AXES, GOVERNOR, INTERCONNECT, SweepSpec,
                          compare_sync_gals, describe, dfs_report, emit_csv,
                          emit_run_csv, emit_trace_csv, format_comparison,
                          format_dfs_report, run_bundle, sweep)
from .scenario import load_scenario, serialize
from .taskgraph import GENERATORS, generate
from .valuetypes import Int, ParamList, Time

logger = logging.getLogger("galscmp")

## @brief Environment variable redirecting relative output paths.
OUTPUT_DIR_ENV = "GALSCMP_OUTPUT_DIR"

LOG_FORMAT = ("%(asctime)s - %(name)s - %(filename)s:%(lineno)s - "
              "%(levelname)s - %(message)s")

EXIT_OK, EXIT_INVALID, EXIT_ERROR = 0, 1, 2

_INVALID = (ConfigError, ValidationError, IOError)


def _time(text):
    try:
        return Time(min=1).unpack(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _count(text):
    try:
        return Int(min=1).unpack(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _seed(text):
    try:
        return Int(min=0).unpack(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH",
                        help="write CSV (or scenario text) to PATH instead of stdout")
    common.add_argument("--seed", type=_seed, default=None,
                        help="override the scenario seed")
    common.add_argument("--duration", type=_time, default=None,
                        help="override the simulated duration, e.g. 500us")
    common.add_argument("--jobs", type=_count, default=1,
                        help="worker processes for independent runs (default 1)")
    common.add_argument("-v", "--verbose", action="store_true",
                        help="log at DEBUG level")

    parser = argparse.ArgumentParser(
        prog="galscmp",
        description="GALS chip-multiprocessor simulator and experiment runner.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("run", parents=[common], help="simulate one scenario")
    p.add_argument("file")

    p = sub.add_parser("sweep", parents=[common],
                       help="vary one axis against the synchronous baseline")
    p.add_argument("file")
    p.add_argument("--axis", required=True, choices=AXES)
    p.add_argument("--values", required=True,
                   help="comma separated axis values, e.g. 1,2,4,8")

    p = sub.add_parser("compare", parents=[common],
                       help="GALS against its synchronous baseline")
    p.add_argument("file")

    p = sub.add_parser("dfs", parents=[common],
                       help="governed run against static f_max")
    p.add_argument("file")
    p.add_argument("--trace-out", metavar="PATH",
                   help="write per-PE frequency traces as CSV")

    p = sub.add_parser("generate", parents=[common],
                       help="write a scenario for a generated workload")
    p.add_argument("--kind", required=True, choices=list(GENERATORS))
    p.add_argument("--params", default="", help="e.g. 'n=4, cycles=64'")

    sub.add_parser("reproduce-paper", aliases=["reproduce"], parents=[common],
                   help="run the bundled checks and write their CSVs")
    return parser


def output_path(path):
    """Relative paths go under $GALSCMP_OUTPUT_DIR when it is set."""
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    path = output_path(path)
    parent = os.path.dirname(path)
    if parent and not os.path.isdir(parent):
        os.makedirs(parent)
    with io.open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info("Wrote %s", path)


def _load(opts):
    with io.open(opts.file, "rb") as f:
        scenario = load_scenario(f.read())
    sim = scenario.sim
    if opts.seed is not None:
        sim = sim._replace(seed=opts.seed)
    if opts.duration is not None:
        sim = sim._replace(duration=opts.duration)
    scenario = scenario._replace(sim=sim)
    check_scenario(scenario)
    logger.info("Scenario %s: %s", opts.file, describe(scenario))
    return scenario


def _sweep_values(axis, text):
    parts = [v.strip() for v in text.split(",") if v.strip()]
    if axis in (GOVERNOR, INTERCONNECT):
        return parts
    try:
        return [Int(min=0).unpack(v) for v in parts]
    except ValueError as e:
        raise ConfigError("Bad --values for %s: %s" % (axis, e))


def cmd_run(opts):
    metrics = run(_load(opts))
    for sink, value in metrics.throughput.items():
        print("sink %s: %.6g tokens/s" % (sink, value), file=sys.stderr)
    _write(opts.out, emit_run_csv(metrics))
    return EXIT_OK


def cmd_sweep(opts):
    spec = SweepSpec(_load(opts), opts.axis, _sweep_values(opts.axis, opts.values))
    _write(opts.out, emit_csv(sweep(spec, jobs=opts.jobs), opts.axis))
    return EXIT_OK


def cmd_compare(opts):
    comparison = compare_sync_gals(_load(opts), "gals")
    print(format_comparison(comparison), file=sys.stderr)
    _write(opts.out, emit_csv([comparison.row], "run"))
    return EXIT_OK


def cmd_dfs(opts):
    report = dfs_report(_load(opts))
    print(format_dfs_report(report), file=sys.stderr)
    _write(opts.out, emit_csv(report.rows, "run"))
    if opts.trace_out:
        _write(opts.trace_out, emit_trace_csv(report.traces))
    return EXIT_OK


def cmd_generate(opts):
    try:
        params = ParamList().unpack(opts.params)
    except ValueError as e:
        raise ConfigError("Bad --params: %s" % (e,))
    seed = opts.seed or 0
    graph, mapping = generate(opts.kind, params, seed)
    scenario = Scenario(graph, mapping,
                        origin=GraphOrigin(opts.kind, params, seed))
    if opts.duration is not None:
        scenario = scenario._replace(sim=scenario.sim._replace(duration=opts.duration))
    check_scenario(scenario)
    _write(opts.out, serialize(scenario))
    return EXIT_OK


def cmd_reproduce(opts):
    results = run_bundle(jobs=opts.jobs)
    for result in results:
        _write(os.path.join(opts.out or "", "%s.csv" % result.name), result.csv)
        print("%s %s: %s" % ("PASS" if result.passed else "FAIL", result.name,
                             result.detail))
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "dfs": cmd_dfs,
    "generate": cmd_generate,
    "reproduce-paper": cmd_reproduce,
    "reproduce": cmd_reproduce,
}


def main(argv=None):
    opts = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if opts.verbose else logging.INFO,
                        stream=sys.stderr, format=LOG_FORMAT)
    try:
        return COMMANDS[opts.command](opts)
    except SweepError as e:
        logger.error("%s", e)
        return EXIT_INVALID if isinstance(e.error, _INVALID) else EXIT_ERROR
    except _INVALID as e:
        logger.error("%s", e)
        return EXIT_INVALID
    except Exception:
        logger.exception("galscmp %s failed", opts.command)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
