# testutils.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Test utils for galscmp package tests.

Includes two independent oracles: a single-clock simulator built on plain
deques, and an exhaustive cycle enumerator over node permutations.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import itertools
import logging

from builtins import object, range, zip
from collections import OrderedDict, deque

from .core import Interval, period_of, rate
from .dfs import energy
from .engine import (ChannelConfig, ClockConfig, CycleSampler, Metrics,
                     OccupancyStats, Scenario, SimConfig, StallBreakdown,
                     check_scenario)
from .fifo import HANDSHAKE, MULTIWORD, READER, WRITER
from .taskgraph import (POINT_TO_POINT, Channel, Mapping, TaskGraph, TaskNode,
                        generate)

logger = logging.getLogger(__name__)


class TestLogHandler(logging.Handler):
    """A log handler that remembers records for galscmp tests."""
    def __init__(self):
        """Create a TestLogHandler."""
        logging.Handler.__init__(self)
        self._records = []

    def emit(self, record):
        """Handle the arrival of a log message."""
        self._records.append(record)

    def clear(self):
        """Clear the list of remembered logs."""
        self._records = []

    def messages(self, level=logging.WARNING):
        return [r.getMessage() for r in self._records if r.levelno >= level]


class MetricsAssertionsMixin(object):
    """Mixin class for comparing run results in TestCases."""

    def assert_metrics_equal(self, actual, expected):
        """Assert field by field so a failure names the differing field."""
        for field in Metrics._fields:
            self.assertEqual(getattr(actual, field), getattr(expected, field),
                             "Metrics field %r differs." % (field,))

    def assert_cycle_accounting(self, metrics, scenario):
        """Every PE's classified edges add up to the edges in the window.

        Edges are counted from the run's own frequency trace, so PEs whose
        governor switched frequency are checked too.
        """
        start, end = scenario.sim.window
        for pe_id, stalls in metrics.stalls.items():
            phase = scenario.clocks.domain_for(pe_id).phase
            edges = 0
            for i, (span, f) in enumerate(metrics.frequency_trace[pe_id]):
                first = phase if i == 0 else span.start
                lo, hi = max(span.start, start), min(span.end, end)
                if hi > lo:
                    edges += (_edges_before(hi, first, period_of(f))
                              - _edges_before(lo, first, period_of(f)))
            self.assertEqual(stalls.total, edges, "PE %r edge count" % (pe_id,))


def _edges_before(t, first, period):
    """Edges of the series first + k * period lying before t."""
    if t <= first:
        return 0
    return -(-(t - first) // period)


# Builders

def chain_scenario(cycles, frequency=100 * 10 ** 6, capacity=32, stages=2,
                   duration=10 ** 11, warmup=0, seed=0,
                   interconnect=POINT_TO_POINT, clocks=None, governor=None,
                   power=None, flow_control=MULTIWORD, initial=None):
    """Linear pipeline ``n0 -> n1 -> ...`` with one node per entry of cycles."""
    n = len(cycles)
    names = ["n%d" % i for i in range(n)]
    nodes = [TaskNode(name, c, [("in", 1)] if i > 0 else [],
                      [("out", 1)] if i < n - 1 else [])
             for i, (name, c) in enumerate(zip(names, cycles))]
    channels = [Channel(i, a, "out", b, "in", capacity,
                        (initial or {}).get(i, 0))
                for i, (a, b) in enumerate(zip(names, names[1:]))]
    mapping = Mapping(dict((name, (i, 0)) for i, name in enumerate(names)),
                      (n, 1), interconnect)
    return Scenario(TaskGraph(nodes, channels), mapping,
                    clocks=clocks or ClockConfig(frequency=frequency),
                    channels=ChannelConfig(stages=stages,
                                           flow_control=flow_control),
                    governor=governor, power=power,
                    sim=SimConfig(duration, warmup, seed))


def generated_scenario(kind, params=None, seed=0, duration=10 ** 11, warmup=None,
                       stages=2, capacity=None, frequency=100 * 10 ** 6,
                       interconnect=None):
    """Scenario around a generated workload with uniform clocks."""
    graph, mapping = generate(kind, params, seed)
    if interconnect is not None:
        mapping = mapping._replace(interconnect=interconnect)
    return Scenario(graph, mapping, clocks=ClockConfig(frequency=frequency),
                    channels=ChannelConfig(capacity=capacity, stages=stages),
                    sim=SimConfig(duration, warmup, seed))


def drive_fifo(fifo, actions, edges=40):
    """Attempt pushes and pops on the first edges of both FIFO domains.

    Edges are visited in time order, writer first at equal times; each edge
    acts or idles according to the next entry of the cycled ``actions``.

    Returns
    -------
    (checks, popped) : (list, list)
        (time, writer view, true occupancy, reader view) after every edge,
        and the popped tokens in order.
    """
    events = sorted([(fifo.write_domain.edge_at(i), 0) for i in range(edges)]
                    + [(fifo.read_domain.edge_at(i), 1) for i in range(edges)])
    flags = itertools.cycle(actions or [True])
    checks, popped = [], []
    for t, side in events:
        if next(flags):
            if side == 0:
                fifo.try_push(fifo.make_token(), t)
            else:
                tok = fifo.try_pop(t)
                if tok is not None:
                    popped.append(tok)
        checks.append((t, fifo.observed_occupancy(WRITER, t), fifo.true_occupancy(t),
                       fifo.observed_occupancy(READER, t)))
    return checks, popped


# Oracles

def brute_force_cycles(graph):
    """All elementary channel cycles, found by trying every node sequence."""
    links = {}
    for c in graph.channels.values():
        links.setdefault((c.src, c.dst), []).append(c.id)
    found = set()
    nodes = list(graph.nodes)
    for size in range(1, len(nodes) + 1):
        for order in itertools.permutations(nodes, size):
            hops = list(zip(order, order[1:] + order[:1]))
            if not all(hop in links for hop in hops):
                continue
            for choice in itertools.product(*[links[hop] for hop in hops]):
                first = choice.index(min(choice))
                found.add(tuple(choice[first:] + choice[:first]))
    return sorted(found)


def reference_run(scenario):
    """Single-clock simulation of a synchronous scenario.

    Every PE ticks on the same edges and is stepped in node order; channels
    are bounded deques whose contents both sides see immediately. Only valid
    for zero synchronizer stages, uniform aligned clocks, static governors
    and point-to-point links.
    """
    check_scenario(scenario)
    graph = scenario.graph
    clocks, cfg = scenario.clocks, scenario.channels
    if clocks.overrides or scenario.is_governed:
        raise ValueError("reference_run needs uniform clocks and static governors")
    if scenario.mapping.interconnect != POINT_TO_POINT:
        raise ValueError("reference_run needs point-to-point links")
    if any(cfg.stages_of(c) != 0 for c in graph.channels.values()):
        raise ValueError("reference_run needs zero synchronizer stages")
    period = period_of(clocks.frequency)
    start, end = scenario.sim.window
    queues = OrderedDict((c.id, deque(range(c.initial_tokens)))
                         for c in graph.channels.values())
    limit = dict((c.id, 1 if cfg.flow_control == HANDSHAKE else cfg.capacity_of(c))
                 for c in graph.channels.values())
    area = dict((cid, 0) for cid in queues)
    low, high = {}, {}

    def hold(until, since):
        lo, hi = max(since, start), min(until, end)
        if hi > lo:
            for cid, q in queues.items():
                area[cid] += len(q) * (hi - lo)
                low[cid] = min(low.get(cid, len(q)), len(q))
                high[cid] = max(high.get(cid, len(q)), len(q))

    class Pe(object):
        pass

    pes = []
    for index, node in enumerate(graph.nodes.values()):
        pe = Pe()
        pe.node = node
        pe.sampler = CycleSampler(
            node, index, scenario.sim.seed,
            [d for d in scenario.disturbances if d.node == node.id])
        pe.ins = [(c.dst_port, c.id, dict(node.consume)[c.dst_port])
                  for c in graph.in_channels(node.id)]
        pe.outs = [(c.src_port, c.id, dict(node.produce)[c.src_port])
                   for c in graph.out_channels(node.id)]
        pe.got = dict((p, 0) for p, _, _ in pe.ins)
        pe.put = dict((p, 0) for p, _, _ in pe.outs)
        pe.phase = "acquiring"
        pe.left = 0
        pe.counts = [0, 0, 0, 0, 0]
        pe.before = None
        pes.append(pe)

    hold(clocks.phase, 0)
    n = 0
    while True:
        t = clocks.phase + n * period
        if t >= end:
            break
        if t >= start and pes[0].before is None:
            for pe in pes:
                pe.before = list(pe.counts)
        for pe in pes:
            began = pe.phase
            moved = computed = False
            if pe.phase == "acquiring":
                waiting = False
                for port, cid, need in pe.ins:
                    if pe.got[port] < need and queues[cid]:
                        queues[cid].popleft()
                        pe.got[port] += 1
                        moved = True
                    waiting = waiting or pe.got[port] < need
                if not waiting:
                    pe.got = dict((p, 0) for p in pe.got)
                    pe.left = pe.sampler.next(t)
                    pe.phase = "computing"
            if pe.phase == "computing":
                pe.left -= 1
                computed = True
                if pe.left == 0:
                    pe.phase = "emitting"
            if pe.phase == "emitting":
                waiting = False
                for port, cid, need in pe.outs:
                    if pe.put[port] < need and len(queues[cid]) < limit[cid]:
                        queues[cid].append(t)
                        pe.put[port] += 1
                        moved = True
                    waiting = waiting or pe.put[port] < need
                if not waiting:
                    pe.put = dict((p, 0) for p in pe.put)
                    pe.counts[4] += 1
                    pe.phase = "acquiring"
            if computed:
                pe.counts[2] += 1
            elif moved:
                pe.counts[3] += 1
            elif began == "acquiring":
                pe.counts[0] += 1
            else:
                pe.counts[1] += 1
        hold(t + period, t)
        n += 1

    for pe in pes:
        if pe.before is None:
            pe.before = list(pe.counts)
    duration = end - start
    stalls = OrderedDict((pe.node.id, StallBreakdown(*[a - b for a, b in
                                                       zip(pe.counts, pe.before)]))
                         for pe in pes)
    sink_tokens = OrderedDict((s, stalls[s].firings) for s in graph.sinks)
    throughput = OrderedDict((s, rate(k, duration)) for s, k in sink_tokens.items())
    occupancy = OrderedDict((cid, OccupancyStats(low[cid], area[cid] / duration,
                                                 high[cid]))
                            for cid in queues)
    f = clocks.frequency
    trace = OrderedDict((node, [(Interval(0, end), f)]) for node in graph.nodes)
    measured = OrderedDict((node, [(Interval(start, end), f)]) for node in graph.nodes)
    models = dict((node, scenario.power.model_for(clocks.domain_for(node)))
                  for node in graph.nodes)
    per_pe, total = energy(measured, models, Interval(start, end))
    warnings = ()
    if not any(sink_tokens.values()):
        warnings = ("no tokens reached any sink in the measured window",)
    return Metrics(throughput, sink_tokens, stalls, occupancy, trace, per_pe,
                   total, duration, OrderedDict(), warnings)
