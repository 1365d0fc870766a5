# engine.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Discrete-event simulation of PEs exchanging tokens through dual-clock FIFOs.

Every PE steps on the rising edges of its own clock domain. On one edge a PE
attempts its pops, runs one compute cycle and attempts its pushes, in that
order, and the edge is classified as compute, progress, read stall or write
stall. Events at the same instant are processed in ascending domain id with
the shared bus after every PE and measurement or governor markers before
all of them.

PEs that are computing or stalled do not wake on every edge. A computing PE
sleeps until the edge that finishes its countdown; a stalled PE sleeps until
a pointer update it is waiting for becomes visible, and the FIFO observer
wakes it early when the other side acts. Skipped edges are credited to the
sleep kind, so counters are the same as an edge-by-edge execution.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import bisect
import heapq
import itertools
import logging

from builtins import object, range
from collections import OrderedDict, deque, namedtuple

import networkx as nx
import numpy as np

from .clocks import (DEFAULT_FMIN_DIVISOR, DEFAULT_LEVEL_COUNT,
                     DEFAULT_SYNC_STAGES, ClockDomain, SyncConfig,
                     default_levels, sync_observe)
from .core import (ConfigError, Interval, PenaltyError,
                   UnsupportedAnalysisError, ValidationError, rate)
from .dfs import (AUTO, DEFAULT_BUSY_FLOOR, DEFAULT_DOWN_THRESHOLD, DEFAULT_KD,
                  DEFAULT_KI, DEFAULT_KP, DEFAULT_UP_THRESHOLD, DEFAULT_WINDOW,
                  Governor, PowerModel, WindowSample, energy)
from .fifo import (FLOW_CONTROL_MODES, MULTIWORD, POP, PUSH, READER, WRITER,
                   DualClockFifo)
from .taskgraph import SHARED_BUS, bottleneck_rate, validate

logger = logging.getLogger(__name__)

## @brief Default PE frequency (100 MHz).
DEFAULT_FREQUENCY = 100 * 10 ** 6

## @brief Default simulated duration (1 ms) in femtoseconds.
DEFAULT_DURATION = 10 ** 12

## @brief Warmup as a fraction of the duration when none is given.
DEFAULT_WARMUP_FRACTION = 0.1

## @brief Bus cycles occupied by one token transfer.
DEFAULT_BUS_CYCLES = 1

# PE phases
ACQUIRING, COMPUTING, EMITTING = "acquiring", "computing", "emitting"

# What a sleeping PE's skipped edges count as
COMPUTE_SLEEP, READ_STALL, WRITE_STALL = "compute", "read_stall", "write_stall"

# Heap keys of the markers; PEs use their domain id, the bus the PE count
_MEASURE_KEY, _WINDOW_KEY = -2, -1
_START, _END = "start", "end"


# Scenario

class ClockConfig(namedtuple("ClockConfig",
                             "frequency f_min f_max levels phase overrides "
                             "bus_frequency bus_cycles_per_transfer")):
    """Clock settings shared by all PEs with optional per-PE overrides.

    Parameters
    ----------
    frequency : int
        Initial frequency in Hz.
    f_min, f_max : int or None
        Range of the level grid; default to ``f_max / 8`` and ``frequency``.
    levels : int or tuple of int
        Number of evenly spaced levels, or an explicit list in Hz.
    phase : int
        First edge time in femtoseconds.
    overrides : dict
        PE id to a dict with any of ``frequency``, ``phase``, ``f_min``
        and ``f_max``.
    bus_frequency : int or None
        Shared bus clock; defaults to the highest PE f_max.
    bus_cycles_per_transfer : int
    """

    __slots__ = ()

    def __new__(cls, frequency=DEFAULT_FREQUENCY, f_min=None, f_max=None,
                levels=DEFAULT_LEVEL_COUNT, phase=0, overrides=None,
                bus_frequency=None, bus_cycles_per_transfer=DEFAULT_BUS_CYCLES):
        if isinstance(levels, list):
            levels = tuple(levels)
        overrides = dict((k, dict(v)) for k, v in (overrides or {}).items())
        return super(ClockConfig, cls).__new__(cls, frequency, f_min, f_max,
                                               levels, phase, overrides,
                                               bus_frequency,
                                               bus_cycles_per_transfer)

    def setting(self, pe_id, key):
        return self.overrides.get(pe_id, {}).get(key, getattr(self, key))

    def domain_for(self, pe_id):
        """Build the :class:`ClockDomain` of one PE."""
        frequency = self.setting(pe_id, "frequency")
        f_max = self.setting(pe_id, "f_max")
        f_min = self.setting(pe_id, "f_min")
        if isinstance(self.levels, tuple):
            levels = self.levels
        else:
            top = frequency if f_max is None else f_max
            bottom = top // DEFAULT_FMIN_DIVISOR if f_min is None else f_min
            levels = default_levels(bottom, top, self.levels)
        return ClockDomain(pe_id, frequency, levels=levels, f_min=f_min,
                           f_max=f_max, phase=self.setting(pe_id, "phase"))


class ChannelConfig(namedtuple("ChannelConfig",
                               "capacity stages flow_control overrides")):
    """FIFO settings; ``capacity`` of None keeps each channel's own capacity.

    ``overrides`` maps a channel id to a dict with ``capacity`` and/or
    ``stages``.
    """

    __slots__ = ()

    def __new__(cls, capacity=None, stages=DEFAULT_SYNC_STAGES,
                flow_control=MULTIWORD, overrides=None):
        overrides = dict((k, dict(v)) for k, v in (overrides or {}).items())
        return super(ChannelConfig, cls).__new__(cls, capacity, stages,
                                                 flow_control, overrides)

    def capacity_of(self, channel):
        default = channel.capacity if self.capacity is None else self.capacity
        return self.overrides.get(channel.id, {}).get("capacity", default)

    def stages_of(self, channel):
        return self.overrides.get(channel.id, {}).get("stages", self.stages)

    def with_stages(self, stages):
        """Same settings with every channel at the given synchronizer depth."""
        overrides = {}
        for cid, values in self.overrides.items():
            rest = dict((k, v) for k, v in values.items() if k != "stages")
            if rest:
                overrides[cid] = rest
        return self._replace(stages=stages, overrides=overrides)

    def with_capacity(self, capacity):
        """Same settings with every channel at the given capacity."""
        overrides = {}
        for cid, values in self.overrides.items():
            rest = dict((k, v) for k, v in values.items() if k != "capacity")
            if rest:
                overrides[cid] = rest
        return self._replace(capacity=capacity, overrides=overrides)


class GovernorConfig(namedtuple("GovernorConfig",
                                "kind overrides kp ki kd setpoint f_nominal "
                                "window up_threshold down_threshold busy_floor")):
    """Governor kind per PE plus the shared governor parameters."""

    __slots__ = ()

    def __new__(cls, kind="static", overrides=None, kp=DEFAULT_KP, ki=DEFAULT_KI,
                kd=DEFAULT_KD, setpoint=AUTO, f_nominal=AUTO,
                window=DEFAULT_WINDOW, up_threshold=DEFAULT_UP_THRESHOLD,
                down_threshold=DEFAULT_DOWN_THRESHOLD,
                busy_floor=DEFAULT_BUSY_FLOOR):
        return super(GovernorConfig, cls).__new__(
            cls, kind, dict(overrides or {}), kp, ki, kd, setpoint, f_nominal,
            window, up_threshold, down_threshold, busy_floor)

    def kind_of(self, pe_id):
        return self.overrides.get(pe_id, self.kind)

    def with_kind(self, kind):
        return self._replace(kind=kind, overrides={})


class PowerConfig(namedtuple("PowerConfig",
                             "switched_capacitance leakage v_min v_max")):
    __slots__ = ()

    def __new__(cls, switched_capacitance=1.0, leakage=0.0, v_min=0.8, v_max=1.3):
        return super(PowerConfig, cls).__new__(cls, switched_capacitance, leakage,
                                               v_min, v_max)

    def model_for(self, domain):
        return PowerModel(self.switched_capacitance, self.v_min, self.v_max,
                          domain.f_min, domain.f_max, self.leakage)


class SimConfig(namedtuple("SimConfig", "duration warmup seed")):
    """Run length, measurement start and seed; warmup None means 10%."""

    __slots__ = ()

    def __new__(cls, duration=DEFAULT_DURATION, warmup=None, seed=0):
        return super(SimConfig, cls).__new__(cls, duration, warmup, seed)

    @property
    def warmup_time(self):
        if self.warmup is None:
            return int(self.duration * DEFAULT_WARMUP_FRACTION)
        return self.warmup

    @property
    def window(self):
        return Interval(self.warmup_time, self.duration)


class Disturbance(namedtuple("Disturbance", "node at cycles")):
    """From time ``at`` on, firings of ``node`` cost ``cycles``."""

    __slots__ = ()


class GraphOrigin(namedtuple("GraphOrigin", "kind params seed remove_feedback")):
    """How a scenario's graph was generated, so it can be regenerated."""

    __slots__ = ()

    def __new__(cls, kind, params=(), seed=0, remove_feedback=False):
        params = tuple(sorted(dict(params).items()))
        return super(GraphOrigin, cls).__new__(cls, kind, params, seed,
                                               bool(remove_feedback))


class Scenario(namedtuple("Scenario", "graph mapping clocks channels governor "
                                      "power sim disturbances origin")):
    """Everything one simulation run needs."""

    __slots__ = ()

    def __new__(cls, graph, mapping, clocks=None, channels=None, governor=None,
                power=None, sim=None, disturbances=(), origin=None):
        return super(Scenario, cls).__new__(
            cls, graph, mapping,
            ClockConfig() if clocks is None else clocks,
            ChannelConfig() if channels is None else channels,
            GovernorConfig() if governor is None else governor,
            PowerConfig() if power is None else power,
            SimConfig() if sim is None else sim,
            tuple(disturbances), origin)

    @property
    def is_governed(self):
        return any(self.governor.kind_of(n) != "static" for n in self.graph.nodes)


def validate_scenario(scenario):
    """Every problem with a scenario, as a list of messages."""
    errors = validate(scenario.graph, scenario.mapping)
    nodes = scenario.graph.nodes
    sim = scenario.sim
    if not sim.duration > sim.warmup_time >= 0:
        errors.append("need duration > warmup >= 0, got duration %r warmup %r"
                      % (sim.duration, sim.warmup_time))
    if sim.seed < 0:
        errors.append("seed must be non-negative, got %r" % (sim.seed,))
    for pe_id in sorted(scenario.clocks.overrides):
        if pe_id not in nodes:
            errors.append("clock override for unknown PE %r" % (pe_id,))
    for pe_id in nodes:
        try:
            scenario.clocks.domain_for(pe_id)
        except ConfigError as e:
            errors.append(str(e))
    if scenario.clocks.bus_cycles_per_transfer < 1:
        errors.append("bus_cycles_per_transfer must be at least 1")
    channels = scenario.channels
    if channels.flow_control not in FLOW_CONTROL_MODES:
        errors.append("unknown flow control %r" % (channels.flow_control,))
    if channels.capacity is not None and channels.capacity < 1:
        errors.append("channel capacity must be at least 1")
    if channels.stages < 0:
        errors.append("synchronizer stages must be non-negative")
    for cid in sorted(channels.overrides):
        if cid not in scenario.graph.channels:
            errors.append("channel override for unknown channel %r" % (cid,))
    known = list(Governor.GOVERNOR_LOOKUP_REV)
    for pe_id in nodes:
        kind = scenario.governor.kind_of(pe_id)
        if kind not in known:
            errors.append("PE %r has unknown governor %r" % (pe_id, kind))
    for pe_id in sorted(scenario.governor.overrides):
        if pe_id not in nodes:
            errors.append("governor override for unknown PE %r" % (pe_id,))
    if scenario.governor.window <= 0:
        errors.append("governor window must be positive")
    for d in scenario.disturbances:
        if d.node not in nodes:
            errors.append("disturbance for unknown node %r" % (d.node,))
        if d.at < 0:
            errors.append("disturbance time %r is negative" % (d.at,))
    return errors


def check_scenario(scenario):
    errors = validate_scenario(scenario)
    if errors:
        raise ValidationError(errors)


def baseline_of(scenario):
    """The synchronous reference of a scenario: every channel at zero stages."""
    return scenario._replace(channels=scenario.channels.with_stages(0))


# Metrics

class StallBreakdown(namedtuple("StallBreakdown",
                                "read_stall write_stall compute progress firings")):
    """Edge classification counts of one PE."""

    __slots__ = ()

    @property
    def total(self):
        return self.read_stall + self.write_stall + self.compute + self.progress

    @property
    def busy(self):
        return self.compute + self.progress

    def fraction(self, name):
        total = self.total
        return getattr(self, name) / total if total else 0.0

    def __sub__(self, other):
        return StallBreakdown(*[a - b for a, b in zip(self, other)])


class OccupancyStats(namedtuple("OccupancyStats", "min mean max")):
    """Time-weighted occupancy of one channel over the measured window."""

    __slots__ = ()


class Metrics(namedtuple("Metrics", "throughput sink_tokens stalls occupancy "
                                    "frequency_trace energy total_energy "
                                    "duration samples warnings")):
    """Result of one run.

    Attributes
    ----------
    throughput : OrderedDict
        Sink id to tokens per second over the measured window.
    sink_tokens : OrderedDict
        Sink id to firings completed in the measured window.
    stalls : OrderedDict
        PE id to :class:`StallBreakdown` over the measured window.
    occupancy : OrderedDict
        Channel id to :class:`OccupancyStats`.
    frequency_trace : OrderedDict
        PE id to (Interval, Hz) pieces over the whole run.
    energy : OrderedDict
        PE id to energy over the measured window.
    total_energy : float
    duration : int
        Measured window length in femtoseconds.
    samples : OrderedDict
        Governed PE id to a list of (WindowSample, chosen frequency).
    warnings : tuple of str
    """

    __slots__ = ()

    @property
    def total_throughput(self):
        return sum(self.throughput.values())


class OccupancyMonitor(object):
    """FIFO observer integrating true occupancy over [start, end)."""

    def __init__(self, start, end, level):
        self.start = start
        self.end = end
        self.level = level
        self._last = 0
        self._area = 0
        self._min = None
        self._max = None

    def update(self, fifo, event):
        if event.kind in (PUSH, POP):
            self._advance(event.time)
            self.level = event.occupancy

    def _advance(self, t):
        lo, hi = max(self._last, self.start), min(t, self.end)
        if hi > lo:
            self._area += self.level * (hi - lo)
            self._min = self.level if self._min is None else min(self._min, self.level)
            self._max = self.level if self._max is None else max(self._max, self.level)
        self._last = max(self._last, t)

    def stats(self):
        self._advance(self.end)
        return OccupancyStats(self._min, self._area / (self.end - self.start),
                              self._max)


# Simulation state

class CycleSampler(object):
    """Compute cycles per firing of one node, honouring disturbances.

    Variable costs are drawn from a generator seeded with the node's own
    seed, or with (scenario seed, PE index) when the node has none.
    """

    def __init__(self, node, index, seed, disturbances=()):
        schedule = [(0, node.compute_cycles)]
        schedule.extend(sorted(((d.at, d.cycles) for d in disturbances),
                               key=lambda item: item[0]))
        self._times = [at for at, _ in schedule]
        self._cycles = [c for _, c in schedule]
        entropy = node.seed if node.seed is not None else [seed, index]
        self._rng = np.random.default_rng(entropy)

    def next(self, t):
        """Cycles of a firing that starts at time t."""
        cycles = self._cycles[bisect.bisect_right(self._times, t) - 1]
        if isinstance(cycles, tuple):
            lo, hi = cycles
            return int(self._rng.integers(lo, hi + 1))
        return cycles


class PeState(object):
    """Firing state machine and edge counters of one PE."""

    def __init__(self, node, index, domain, sampler):
        self.node = node
        self.index = index
        self.domain = domain
        self.sampler = sampler
        self.phase = ACQUIRING
        self.remaining = 0
        # (port, fifo, rate) in channel id order
        self.inputs = []
        self.outputs = []
        self.received = {}
        self.sent = {}
        self.read_stall = 0
        self.write_stall = 0
        self.compute = 0
        self.progress = 0
        self.firings = 0
        # first edge index not yet classified
        self.accounted_upto = 0
        self.wake_idx = 0
        self.sleep_kind = None
        self.blocking = ()
        self.version = 0
        self.governor = None
        self.window_mark = None
        self.samples = []

    def __repr__(self):
        return "<PeState %r %s>" % (self.node.id, self.phase)

    def counters(self):
        return StallBreakdown(self.read_stall, self.write_stall, self.compute,
                              self.progress, self.firings)


class BusModel(object):
    """Shared bus granting one transfer at a time, round-robin over PEs.

    Parameters
    ----------
    domain : :class:`ClockDomain`
        Bus clock.
    cycles_per_transfer : int
        Bus cycles a granted transfer occupies.
    pe_count : int
        Number of requesters.
    """

    def __init__(self, domain, cycles_per_transfer, pe_count):
        if cycles_per_transfer < 1:
            raise ConfigError("Bus cycles per transfer must be at least 1.")
        self.domain = domain
        self.cycles_per_transfer = cycles_per_transfer
        self.cursor = 0
        self.pending = [deque() for _ in range(pe_count)]
        # (fifo, completion edge index) of the transfer on the bus
        self.in_flight = None
        self.scheduled = None
        self.version = 0
        self.grants = []

    def request(self, pe_index, fifo, t):
        self.pending[pe_index].append((t, fifo))

    def has_pending(self):
        return any(self.pending)

    def grant(self, g):
        """Next request made strictly before bus edge g, round-robin from the cursor.

        Returns
        -------
        granted : (int, :class:`DualClockFifo`) or None
        """
        n = len(self.pending)
        for step in range(n):
            i = (self.cursor + step) % n
            queue = self.pending[i]
            if queue and queue[0][0] < g:
                _, fifo = queue.popleft()
                self.cursor = (i + 1) % n
                self.grants.append((g, i))
                return i, fifo
        return None


class Simulation(object):
    """One execution of a :class:`Scenario`.

    Parameters
    ----------
    scenario : :class:`Scenario`

    Raises
    ------
    ValidationError
        If the scenario is not valid.
    """

    def __init__(self, scenario):
        check_scenario(scenario)
        self.scenario = scenario
        graph = scenario.graph
        self.graph = graph
        self.start, self.end = scenario.sim.window
        self._heap = []
        self._seq = itertools.count()
        self._now = 0
        self._current_key = None
        self.domains = OrderedDict((n, scenario.clocks.domain_for(n))
                                   for n in graph.nodes)
        self.pes = []
        for index, node in enumerate(graph.nodes.values()):
            disturbances = [d for d in scenario.disturbances if d.node == node.id]
            sampler = CycleSampler(node, index, scenario.sim.seed, disturbances)
            self.pes.append(PeState(node, index, self.domains[node.id], sampler))
        self._pe_by_id = dict((pe.node.id, pe) for pe in self.pes)
        self.bus = None
        if scenario.mapping.interconnect == SHARED_BUS:
            clocks = scenario.clocks
            f_bus = clocks.bus_frequency
            if f_bus is None:
                f_bus = max(d.f_max for d in self.domains.values())
            self.bus = BusModel(ClockDomain("bus", f_bus, levels=(f_bus,)),
                                clocks.bus_cycles_per_transfer, len(self.pes))
        self._bus_key = len(self.pes)
        self.fifos = OrderedDict()
        self.monitors = OrderedDict()
        self._readers = {}
        self._writers = {}
        self._local = set()
        self._build_channels()
        self._build_governors()

    def _build_channels(self):
        cfg = self.scenario.channels
        for c in self.graph.channels.values():
            writer, reader = self._pe_by_id[c.src], self._pe_by_id[c.dst]
            stages = 0 if c.src == c.dst else cfg.stages_of(c)
            fifo = DualClockFifo(cfg.capacity_of(c), writer.domain, reader.domain,
                                 read_sync=SyncConfig(stages),
                                 initial_tokens=c.initial_tokens,
                                 flow_control=cfg.flow_control, name=c.id)
            monitor = OccupancyMonitor(self.start, self.end, c.initial_tokens)
            fifo.attach(self)
            fifo.attach(monitor)
            self.fifos[c.id] = fifo
            self.monitors[c.id] = monitor
            self._writers[fifo] = writer
            self._readers[fifo] = reader
            if c.src == c.dst:
                self._local.add(fifo)
            produce = dict(writer.node.produce)[c.src_port]
            consume = dict(reader.node.consume)[c.dst_port]
            writer.outputs.append((c.src_port, fifo, produce))
            reader.inputs.append((c.dst_port, fifo, consume))
            writer.sent[c.src_port] = 0
            reader.received[c.dst_port] = 0

    def _build_governors(self):
        cfg = self.scenario.governor
        self._governed = []
        for pe in self.pes:
            kind = cfg.kind_of(pe.node.id)
            if kind == "static":
                continue
            params = dict(up_threshold=cfg.up_threshold,
                          down_threshold=cfg.down_threshold)
            if kind == "pid":
                params.update(setpoint=self._setpoint(pe), f_min=pe.domain.f_min,
                              f_max=pe.domain.f_max, f_nominal=cfg.f_nominal,
                              cycles=pe.node.expected_cycles, kp=cfg.kp, ki=cfg.ki,
                              kd=cfg.kd, window=cfg.window,
                              busy_floor=cfg.busy_floor)
            pe.governor = Governor.get_governor(kind, **params)
            pe.window_mark = pe.counters()
            self._governed.append(pe)

    def _setpoint(self, pe):
        """PID setpoint; "auto" is the bottleneck rate of the sinks pe feeds."""
        setpoint = self.scenario.governor.setpoint
        if setpoint != AUTO:
            return setpoint
        freqs = dict((n, d.frequency) for n, d in self.domains.items())
        try:
            rates = bottleneck_rate(self.graph, freqs)
        except UnsupportedAnalysisError as e:
            raise ConfigError("Automatic PID setpoint unavailable: %s. Give "
                              "an explicit setpoint." % (e,))
        g = self.graph.to_networkx()
        reached = (nx.descendants(g, pe.node.id) | set([pe.node.id])) & set(rates)
        if not reached:
            reached = set(rates)
        return min(rates[s] for s in reached)

    # scheduling

    def _push_event(self, t, key, tag):
        heapq.heappush(self._heap, (t, key, next(self._seq), tag))

    def _schedule(self, pe, idx):
        pe.version += 1
        pe.wake_idx = idx
        if idx is not None:
            self._push_event(pe.domain.edge_at(idx), pe.index, pe.version)

    def _schedule_bus(self, idx):
        bus = self.bus
        bus.version += 1
        bus.scheduled = idx
        self._push_event(bus.domain.edge_at(idx), self._bus_key, bus.version)

    def _settle(self, pe, idx):
        """Credit skipped edges [accounted_upto, idx) to the sleep kind."""
        n = idx - pe.accounted_upto
        if n <= 0:
            return
        kind = pe.sleep_kind
        if kind == COMPUTE_SLEEP:
            pe.compute += n
            pe.remaining -= n
        elif kind == READ_STALL:
            pe.read_stall += n
        elif kind == WRITE_STALL:
            pe.write_stall += n
        else:
            raise AssertionError("PE %r has %d unaccounted edges while awake"
                                 % (pe.node.id, n))
        pe.accounted_upto = idx

    def _settle_all(self, t):
        for pe in self.pes:
            self._settle(pe, pe.domain.index_of_next_edge(t))

    # FIFO observer

    def update(self, fifo, event):
        """Wake a PE sleeping on fifo when the other side acts."""
        if event.kind == PUSH:
            pe, kind, sync = self._readers[fifo], READ_STALL, fifo.read_sync
        elif event.kind == POP:
            pe, kind, sync = self._writers[fifo], WRITE_STALL, fifo.write_sync
        else:
            return
        if pe.sleep_kind != kind or fifo not in pe.blocking:
            return
        domain = pe.domain
        idx = domain.index_of_next_edge(sync_observe(event.time, domain, sync))
        if domain.edge_at(idx) == self._now and pe.index < self._current_key:
            # pe's edge at this instant came before the event
            idx += 1
        idx = max(idx, pe.accounted_upto)
        if pe.wake_idx is None or idx < pe.wake_idx:
            self._schedule(pe, idx)

    # PE and bus edges

    def _push(self, pe, fifo, t):
        if not fifo.can_push(t):
            return False
        tok = fifo.make_token()
        if self.bus is not None and fifo not in self._local:
            fifo.reserve(tok, t)
            self.bus.request(pe.index, fifo, t)
            if self.bus.in_flight is None and self.bus.scheduled is None:
                self._schedule_bus(self.bus.domain.index_of_next_edge(t, strict=True))
        else:
            fifo.try_push(tok, t)
        return True

    def _pe_edge(self, pe, t):
        idx = pe.wake_idx
        self._settle(pe, idx)
        pe.sleep_kind = None
        start_phase = pe.phase
        moved = computed = False
        blocked = []
        if pe.phase == ACQUIRING:
            for port, fifo, need in pe.inputs:
                got = pe.received[port]
                if got < need:
                    if fifo.try_pop(t) is not None:
                        got += 1
                        pe.received[port] = got
                        moved = True
                    if got < need:
                        blocked.append(fifo)
            if not blocked:
                for port in pe.received:
                    pe.received[port] = 0
                pe.remaining = pe.sampler.next(t)
                pe.phase = COMPUTING
        if pe.phase == COMPUTING:
            pe.remaining -= 1
            computed = True
            if pe.remaining == 0:
                pe.phase = EMITTING
        if pe.phase == EMITTING:
            for port, fifo, need in pe.outputs:
                sent = pe.sent[port]
                if sent < need:
                    if self._push(pe, fifo, t):
                        sent += 1
                        pe.sent[port] = sent
                        moved = True
                    if sent < need:
                        blocked.append(fifo)
            if not blocked:
                for port in pe.sent:
                    pe.sent[port] = 0
                pe.firings += 1
                pe.phase = ACQUIRING
        pe.accounted_upto = idx + 1
        if computed:
            pe.compute += 1
        elif moved:
            pe.progress += 1
        elif start_phase == ACQUIRING:
            pe.read_stall += 1
        else:
            pe.write_stall += 1

        if pe.phase == COMPUTING:
            pe.sleep_kind = COMPUTE_SLEEP if pe.remaining > 1 else None
            self._schedule(pe, idx + pe.remaining)
        elif not (computed or moved):
            side = READER if start_phase == ACQUIRING else WRITER
            pe.sleep_kind = READ_STALL if side == READER else WRITE_STALL
            pe.blocking = blocked
            self._schedule(pe, self._stall_wake(pe, blocked, side, t, idx))
        else:
            self._schedule(pe, idx + 1)

    def _stall_wake(self, pe, blocked, side, t, idx):
        """First edge at which an already issued update reaches a blocked side."""
        times = [v for v in (f.next_visible_change(side, t) for f in blocked)
                 if v is not None]
        if not times:
            return None
        return max(pe.domain.index_of_next_edge(min(times)), idx + 1)

    def _bus_edge(self, t):
        bus = self.bus
        idx = bus.scheduled
        bus.scheduled = None
        if bus.in_flight is not None and bus.in_flight[1] == idx:
            fifo = bus.in_flight[0]
            bus.in_flight = None
            fifo.commit(t)
        if bus.in_flight is None:
            granted = bus.grant(t)
            if granted is not None:
                bus.in_flight = (granted[1], idx + bus.cycles_per_transfer)
                self._schedule_bus(idx + bus.cycles_per_transfer)
            elif bus.has_pending():
                self._schedule_bus(idx + 1)

    # governors

    def _window_boundary(self, b):
        window = self.scenario.governor.window
        for pe in self._governed:
            self._settle(pe, pe.domain.index_of_next_edge(b))
            counters = pe.counters()
            spent = counters - pe.window_mark
            pe.window_mark = counters
            sample = WindowSample(b - window, b, spent.firings, spent.busy, spent.total)
            current = pe.domain.frequency
            f = pe.governor.step(sample, current, pe.domain.levels)
            pe.samples.append((sample, f))
            if f == current:
                continue
            logger.debug("%s governor moves %r from %d Hz to %d Hz at %d fs",
                         pe.governor.name, pe.node.id, current, f, b)
            pe.domain.set_frequency(f, b)
            if pe.sleep_kind in (READ_STALL, WRITE_STALL):
                # visibility times of pending updates moved with the clock
                self._schedule(pe, pe.accounted_upto)
            elif pe.wake_idx is not None:
                self._schedule(pe, pe.wake_idx)
        if b + window < self.end:
            self._push_event(b + window, _WINDOW_KEY, None)

    # main loop

    def run(self):
        """Execute the scenario and collect its :class:`Metrics`."""
        scenario = self.scenario
        logger.info("Simulating %d PEs and %d channels for %d fs",
                    len(self.pes), len(self.fifos), self.end)
        for pe in self.pes:
            self._schedule(pe, 0)
        self._push_event(self.start, _MEASURE_KEY, _START)
        self._push_event(self.end, _MEASURE_KEY, _END)
        window = scenario.governor.window
        if self._governed and window < self.end:
            self._push_event(window, _WINDOW_KEY, None)
        started = finished = None
        while self._heap:
            t, key, _, tag = heapq.heappop(self._heap)
            self._now = t
            self._current_key = key
            if key == _MEASURE_KEY:
                self._settle_all(t)
                snapshot = [pe.counters() for pe in self.pes]
                if tag == _START:
                    started = snapshot
                else:
                    finished = snapshot
                    break
            elif key == _WINDOW_KEY:
                self._window_boundary(t)
            elif key == self._bus_key:
                if tag == self.bus.version:
                    self._bus_edge(t)
            else:
                pe = self.pes[key]
                if tag == pe.version:
                    self._pe_edge(pe, t)
        return self._collect(started, finished)

    def _collect(self, started, finished):
        duration = self.end - self.start
        stalls = OrderedDict((pe.node.id, end - begin)
                             for pe, begin, end in zip(self.pes, started, finished))
        sink_tokens = OrderedDict((s, stalls[s].firings) for s in self.graph.sinks)
        throughput = OrderedDict((s, rate(n, duration)) for s, n in sink_tokens.items())
        occupancy = OrderedDict((cid, m.stats()) for cid, m in self.monitors.items())
        trace = OrderedDict((n, d.frequency_trace(0, self.end))
                            for n, d in self.domains.items())
        measured = OrderedDict((n, d.frequency_trace(self.start, self.end))
                               for n, d in self.domains.items())
        models = dict((n, self.scenario.power.model_for(d))
                      for n, d in self.domains.items())
        per_pe, total = energy(measured, models, Interval(self.start, self.end))
        samples = OrderedDict((pe.node.id, list(pe.samples)) for pe in self._governed)
        warnings = []
        if not any(sink_tokens.values()):
            msg = "no tokens reached any sink in the measured window"
            logger.warning("Degenerate run: %s", msg)
            warnings.append(msg)
        metrics = Metrics(throughput, sink_tokens, stalls, occupancy, trace, per_pe,
                          total, duration, samples, tuple(warnings))
        logger.info("Run finished: %d sink tokens, %.6g tokens/s",
                    sum(sink_tokens.values()), metrics.total_throughput)
        return metrics


def run(scenario):
    """Simulate a scenario and return its :class:`Metrics`.

    Identical scenarios (seed included) give identical metrics.
    """
    return Simulation(scenario).run()


def penalty(gals, sync):
    """Mean over sinks of ``1 - gals throughput / sync throughput``.

    Raises
    ------
    PenaltyError
        If a sink has zero synchronous throughput.
    """
    values = []
    for sink, reference in sync.throughput.items():
        if reference == 0:
            raise PenaltyError("Synchronous throughput at sink %r is zero; the "
                               "penalty is undefined." % (sink,))
        values.append(1 - gals.throughput[sink] / reference)
    if not values:
        raise PenaltyError("No sinks to compare.")
    return sum(values) / len(values)
