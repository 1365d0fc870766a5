# experiments.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Experiments built from pairs of runs.

Every GALS run is paired with its synchronous baseline (all synchronizer
stages at zero, everything else identical) and summarised as a
:class:`ReportRow`. Sweeps vary one axis of a base scenario; DFS reports
compare a governed scenario with the same chip held at its top frequency.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import csv
import io
import logging

from builtins import map
from collections import OrderedDict, namedtuple
from concurrent.futures import ProcessPoolExecutor

from .core import (ConfigError, Interval, SweepError, format_frequency,
                   format_time)
from .dfs import Governor, optimal_static_frequencies, trace_energy
from .engine import GraphOrigin, baseline_of, penalty, run
from .scenario import load_scenario
from .taskgraph import INTERCONNECTS, generate, remove_feedback_channels

logger = logging.getLogger(__name__)

# Sweep axes
FIFO_CAPACITY = "fifo_capacity"
SYNC_STAGES = "sync_stages"
PE_COUNT = "pe_count"
GOVERNOR = "governor"
INTERCONNECT = "interconnect"
AXES = (FIFO_CAPACITY, SYNC_STAGES, PE_COUNT, GOVERNOR, INTERCONNECT)

## @brief Penalty at or below which two throughputs count as equal.
MEASUREMENT_GRANULARITY = 0.001

## @brief CSV columns of sweep and comparison tables after the axis column.
ROW_COLUMNS = ("throughput", "baseline_throughput", "penalty", "energy",
               "read_stall", "write_stall")

TRACE_COLUMNS = ("pe", "start_fs", "end_fs", "frequency_hz")

PE_COLUMNS = ("pe", "read_stall", "write_stall", "compute", "progress", "firings",
              "energy")


class ReportRow(namedtuple("ReportRow", "value throughput baseline_throughput "
                                        "penalty energy stall_fractions")):
    """One axis value of a report.

    Attributes
    ----------
    value : object
        Axis value.
    throughput, baseline_throughput : OrderedDict
        Sink id to tokens per second in the run and its baseline.
    penalty : float
        Mean relative throughput loss against the baseline.
    energy : float
        Total energy of the run over the measured window.
    stall_fractions : OrderedDict
        PE id to (read stall, write stall) fractions of its edges.
    """

    __slots__ = ()

    @property
    def total_throughput(self):
        return sum(self.throughput.values())

    @property
    def total_baseline_throughput(self):
        return sum(self.baseline_throughput.values())

    def mean_stall(self, which):
        """Mean over PEs of the read (0) or write (1) stall fraction."""
        if not self.stall_fractions:
            return 0.0
        return (sum(f[which] for f in self.stall_fractions.values())
                / len(self.stall_fractions))


class SweepSpec(namedtuple("SweepSpec", "base axis values")):
    """A base scenario and the ordered values of one axis to try.

    ``fifo_capacity`` sets every channel to the same capacity;
    ``pe_count`` regenerates the graph, so the base needs a generated origin.
    """

    __slots__ = ()

    def __new__(cls, base, axis, values):
        values = tuple(values)
        if axis not in AXES:
            raise ConfigError("Unknown sweep axis '%s'. Known axes are %s."
                              % (axis, list(AXES)))
        if not values:
            raise ConfigError("A sweep needs at least one value.")
        return super(SweepSpec, cls).__new__(cls, base, axis, values)


class Comparison(namedtuple("Comparison", "row gals sync")):
    """A GALS run next to its synchronous baseline."""

    __slots__ = ()

    @property
    def stalls(self):
        return self.gals.stalls

    @property
    def occupancy(self):
        return self.gals.occupancy


class DfsReport(namedtuple("DfsReport",
                           "rows governed baseline energy_ratio throughput_ratio "
                           "bound_savings optimal_frequencies")):
    """A governed run against the same chip held at f_max.

    ``bound_savings`` is the saving of the optimal static frequencies, or
    None when the graph is not a homogeneous dataflow graph.
    """

    __slots__ = ()

    @property
    def savings(self):
        return 1.0 - self.energy_ratio

    @property
    def bound_fraction(self):
        if not self.bound_savings:
            return None
        return self.savings / self.bound_savings

    @property
    def traces(self):
        return self.governed.frequency_trace


# Scenario transforms

def _pe_count_params(origin, count):
    params = dict(origin.params)
    if origin.kind == "fir_chain":
        if params.get("lanes", 1) > 1:
            n = params.get("n", 4)
            if count % n:
                raise ConfigError("PE count %d is not a multiple of the %d-stage "
                                  "lanes." % (count, n))
            params["lanes"] = count // n
        else:
            params["n"] = count
    elif origin.kind == "iir_feedback":
        params["n"] = count
    else:
        raise ConfigError("Graph kind '%s' has a fixed PE count." % (origin.kind,))
    return params


def with_pe_count(scenario, count):
    """Regenerate the scenario's graph with ``count`` PEs."""
    origin = scenario.origin
    if origin is None:
        raise ConfigError("A pe_count sweep needs a generated graph.")
    params = _pe_count_params(origin, int(count))
    graph, mapping = generate(origin.kind, params, origin.seed)
    if origin.remove_feedback:
        graph, _ = remove_feedback_channels(graph)
    mapping = mapping._replace(interconnect=scenario.mapping.interconnect)
    return scenario._replace(
        graph=graph, mapping=mapping,
        origin=GraphOrigin(origin.kind, params, origin.seed, origin.remove_feedback))


def without_feedback(scenario):
    """Scenario with its feedback channels removed."""
    graph, removed = remove_feedback_channels(scenario.graph)
    overrides = dict((cid, v) for cid, v in scenario.channels.overrides.items()
                     if cid not in removed)
    origin = scenario.origin
    if origin is not None:
        origin = origin._replace(remove_feedback=True)
    return scenario._replace(
        graph=graph, channels=scenario.channels._replace(overrides=overrides),
        origin=origin)


def apply_axis(scenario, axis, value):
    """The scenario with one axis set to value."""
    if axis == FIFO_CAPACITY:
        return scenario._replace(channels=scenario.channels.with_capacity(int(value)))
    if axis == SYNC_STAGES:
        return scenario._replace(channels=scenario.channels.with_stages(int(value)))
    if axis == PE_COUNT:
        return with_pe_count(scenario, value)
    if axis == GOVERNOR:
        if value not in Governor.GOVERNOR_LOOKUP_REV:
            raise ConfigError("Unknown governor '%s'." % (value,))
        return scenario._replace(governor=scenario.governor.with_kind(value))
    if axis == INTERCONNECT:
        if value not in INTERCONNECTS:
            raise ConfigError("Unknown interconnect '%s'." % (value,))
        return scenario._replace(
            mapping=scenario.mapping._replace(interconnect=value))
    raise ConfigError("Unknown sweep axis '%s'. Known axes are %s."
                      % (axis, list(AXES)))


def static_baseline_of(scenario):
    """Same chip with every PE static at its f_max."""
    clocks = scenario.clocks
    overrides = {}
    for pe_id in scenario.graph.nodes:
        domain = clocks.domain_for(pe_id)
        settings = dict(clocks.overrides.get(pe_id, {}))
        settings.update(frequency=domain.f_max, f_min=domain.f_min,
                        f_max=domain.f_max)
        overrides[pe_id] = settings
    return scenario._replace(clocks=clocks._replace(overrides=overrides),
                             governor=scenario.governor.with_kind("static"))


# Reports

def _row(value, metrics, reference):
    fractions = OrderedDict(
        (pe, (s.fraction("read_stall"), s.fraction("write_stall")))
        for pe, s in metrics.stalls.items())
    return ReportRow(value, metrics.throughput, reference.throughput,
                     penalty(metrics, reference), metrics.total_energy, fractions)


def compare_sync_gals(scenario, value=None):
    """Run a scenario and its synchronous baseline.

    Raises
    ------
    PenaltyError
        If the baseline delivers no tokens at some sink.
    """
    gals = run(scenario)
    sync = run(baseline_of(scenario))
    row = _row(value, gals, sync)
    if row.total_throughput == 0:
        logger.warning("Zero GALS throughput for %s", value)
    logger.info("Penalty %.6f at %s", row.penalty, value)
    return Comparison(row, gals, sync)


def _sweep_point(point):
    base, axis, value = point
    return compare_sync_gals(apply_axis(base, axis, value), value).row


def _mapper(jobs):
    if jobs is None or jobs <= 1:
        return map, None
    executor = ProcessPoolExecutor(max_workers=jobs)
    return executor.map, executor


def _run_all(function, points, jobs, on_error):
    """Apply function to points in order, in worker processes when jobs > 1."""
    mapper, executor = _mapper(jobs)
    results = []
    try:
        outcomes = mapper(function, points)
        for point in points:
            try:
                results.append(next(outcomes))
            except Exception as e:
                on_error(point, e)
                raise
    finally:
        if executor is not None:
            executor.shutdown()
    return results


def sweep(spec, jobs=1):
    """One :class:`ReportRow` per axis value, in the order given.

    Raises
    ------
    SweepError
        Wrapping the first failing point, with its axis value.
    """
    logger.info("Sweeping %s over %s", spec.axis, list(spec.values))
    points = [(spec.base, spec.axis, v) for v in spec.values]

    def annotate(point, error):
        raise SweepError(spec.axis, point[2], error)

    return _run_all(_sweep_point, points, jobs, annotate)


def _static_bound(scenario, baseline):
    graph = scenario.graph
    if not graph.is_unit_rate() or not baseline.throughput:
        return None, None
    target = min(baseline.throughput.values())
    frequencies = optimal_static_frequencies(graph, target)
    window = Interval(*scenario.sim.window)
    total = 0.0
    for pe_id, f in frequencies.items():
        domain = scenario.clocks.domain_for(pe_id)
        f = min(max(f, domain.f_min), domain.f_max)
        frequencies[pe_id] = f
        total += trace_energy([(window, f)], scenario.power.model_for(domain),
                              window)
    return total, frequencies


def dfs_report(scenario):
    """Energy and throughput of a governed scenario against static f_max.

    Raises
    ------
    ConfigError
        If no PE has a governor other than static.
    """
    if not scenario.is_governed:
        raise ConfigError("A DFS report needs a governor other than static.")
    static = static_baseline_of(scenario)
    baseline = run(static)
    governed = run(scenario)
    rows = [_row("baseline", baseline, baseline), _row("governed", governed, baseline)]
    energy_ratio = governed.total_energy / baseline.total_energy
    throughput_ratio = governed.total_throughput / baseline.total_throughput
    bound_energy, frequencies = _static_bound(scenario, baseline)
    bound = None
    if bound_energy is not None:
        bound = 1.0 - bound_energy / baseline.total_energy
    logger.info("DFS energy ratio %.6g, throughput ratio %.6g",
                energy_ratio, throughput_ratio)
    return DfsReport(rows, governed, baseline, energy_ratio, throughput_ratio,
                     bound, frequencies)


# Output

def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _sink_ids(table):
    sinks = OrderedDict()
    for row in table:
        for sink in list(row.throughput) + list(row.baseline_throughput):
            sinks[sink] = None
    return list(sinks)


def emit_csv(table, axis="value"):
    """CSV text of report rows: header plus one line per row.

    When the rows cover more than one sink, ``throughput_<sink>`` and
    ``baseline_throughput_<sink>`` columns follow the totals; a sink that a
    row does not have is left blank.
    """
    table = list(table)
    sinks = _sink_ids(table)
    if len(sinks) < 2:
        sinks = []
    header = (axis,) + ROW_COLUMNS
    for sink in sinks:
        header += ("throughput_%s" % sink, "baseline_throughput_%s" % sink)
    lines = []
    for row in table:
        line = [row.value,
                "%.6g" % row.total_throughput,
                "%.6g" % row.total_baseline_throughput,
                "%.6f" % row.penalty,
                "%.6g" % row.energy,
                "%.6f" % row.mean_stall(0),
                "%.6f" % row.mean_stall(1)]
        for sink in sinks:
            for rates in (row.throughput, row.baseline_throughput):
                line.append("%.6g" % rates[sink] if sink in rates else "")
        lines.append(line)
    return _csv_text(header, lines)


def emit_trace_csv(traces):
    """CSV text of per-PE frequency traces, one line per constant piece."""
    lines = []
    for pe_id, trace in traces.items():
        for span, f in trace:
            lines.append([pe_id, span[0], span[1], f])
    return _csv_text(TRACE_COLUMNS, lines)


def emit_run_csv(metrics):
    """CSV text of one run: edge counts and energy per PE."""
    lines = []
    for pe_id, s in metrics.stalls.items():
        lines.append([pe_id, s.read_stall, s.write_stall, s.compute, s.progress,
                      s.firings, "%.6g" % metrics.energy[pe_id]])
    return _csv_text(PE_COLUMNS, lines)


def format_comparison(comparison):
    """Human readable stall and occupancy breakdown of a comparison."""
    row = comparison.row
    out = ["penalty %.6f (throughput %.6g vs %.6g tokens/s)"
           % (row.penalty, row.total_throughput, row.total_baseline_throughput)]
    for pe_id, s in comparison.stalls.items():
        out.append("  pe %-12s compute %.3f progress %.3f read_stall %.3f "
                   "write_stall %.3f firings %d"
                   % (pe_id, s.fraction("compute"), s.fraction("progress"),
                      s.fraction("read_stall"), s.fraction("write_stall"), s.firings))
    for cid, occ in comparison.occupancy.items():
        out.append("  channel %-4s occupancy min %s mean %.3f max %s"
                   % (cid, occ.min, occ.mean, occ.max))
    return "\n".join(out)


def format_dfs_report(report):
    out = ["energy savings %.6f, throughput ratio %.6f"
           % (report.savings, report.throughput_ratio)]
    if report.bound_savings is not None:
        out.append("optimal static savings %.6f, reached %.6f of it"
                   % (report.bound_savings, report.bound_fraction or 0.0))
        for pe_id, f in report.optimal_frequencies.items():
            out.append("  pe %-12s optimal %.6g Hz" % (pe_id, f))
    for pe_id, trace in report.traces.items():
        last = trace[-1][1] if trace else None
        out.append("  pe %-12s %d frequency changes, final %s"
                   % (pe_id, max(len(trace) - 1, 0),
                      format_frequency(last) if last else "-"))
    return "\n".join(out)


# Bundled checks

ZERO_PENALTY_SCENARIOS = OrderedDict([
    ("fir_chain", """
[graph]
kind = fir_chain
params = n=4, cycles=64, capacity=1024

[channels]
stages = 2

[sim]
duration = 2ms
"""),
    ("fft_dag", """
[graph]
kind = fft_dag
params = m=8, cycles=10, capacity=1024

[channels]
stages = 2

[sim]
duration = 1ms
"""),
])

LOOP_SCENARIO = """
[graph]
kind = iir_feedback
params = n=3, cycles=10, capacity=1024

[channels]
stages = 2

[sim]
duration = 1ms
"""

# Stage a costs twice the cycles per firing of stage b, so b has slack
SLACK_PIPELINE_SCENARIO = """
[graph]
node.a = cycles=40 at=0,0 out=out:1
node.b = cycles=20 at=1,0 in=in:1
channel.0 = a.out -> b.in capacity=32

[clocks]
frequency = 400MHz
f_min = 50MHz
levels = 16

[governor]
kind = pid

[power]
v_min = 0.6
v_max = 1.2

[sim]
duration = 6ms
warmup = 3ms
"""


class CheckResult(namedtuple("CheckResult", "name passed detail csv")):
    __slots__ = ()


def check_zero_penalty():
    rows = [compare_sync_gals(load_scenario(text), kind).row
            for kind, text in ZERO_PENALTY_SCENARIOS.items()]
    worst = max(row.penalty for row in rows)
    return CheckResult("zero_penalty", worst <= MEASUREMENT_GRANULARITY,
                       "largest penalty %.6f" % worst, emit_csv(rows, "scenario"))


def check_loop_removal():
    scenario = load_scenario(LOOP_SCENARIO)
    loop = compare_sync_gals(scenario, "with_feedback").row
    broken = compare_sync_gals(without_feedback(scenario), "without_feedback").row
    passed = (loop.penalty > 10 * MEASUREMENT_GRANULARITY
              and broken.penalty <= MEASUREMENT_GRANULARITY)
    return CheckResult("loop_removal", passed,
                       "penalty %.6f with feedback, %.6f without"
                       % (loop.penalty, broken.penalty),
                       emit_csv([loop, broken], "scenario"))


def check_dfs_savings():
    report = dfs_report(load_scenario(SLACK_PIPELINE_SCENARIO))
    passed = (0.30 <= report.savings <= 0.50
              and abs(1.0 - report.throughput_ratio) <= 0.01
              and (report.bound_fraction or 0.0) >= 0.75)
    return CheckResult("dfs_savings", passed,
                       "savings %.6f, throughput ratio %.6f, %.6f of the static "
                       "bound" % (report.savings, report.throughput_ratio,
                                  report.bound_fraction or 0.0),
                       emit_csv(report.rows, "run"))


BUNDLE = OrderedDict([
    ("zero_penalty", check_zero_penalty),
    ("loop_removal", check_loop_removal),
    ("dfs_savings", check_dfs_savings),
])


def _run_check(name):
    return BUNDLE[name]()


def run_bundle(jobs=1):
    """Run every bundled check; results come back in bundle order."""
    def fail(name, error):
        logger.error("Check %s failed to run: %s", name, error)

    results = _run_all(_run_check, list(BUNDLE), jobs, fail)
    for result in results:
        logger.info("%s %s: %s", "PASS" if result.passed else "FAIL",
                    result.name, result.detail)
    return results


def describe(scenario):
    """One-line summary used in log messages."""
    return "%d PEs, %d channels, %s at %s for %s" % (
        len(scenario.graph.nodes), len(scenario.graph.channels),
        scenario.mapping.interconnect, format_frequency(scenario.clocks.frequency),
        format_time(scenario.sim.duration))
