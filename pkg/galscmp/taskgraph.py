# taskgraph.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Dataflow application graphs, mesh mappings and workload generators.

Nodes fire by consuming tokens on every input port, computing for a number of
cycles and producing tokens on every output port. Channels connect an output
port to an input port and become dual-clock FIFOs in the simulator.

Feedback removal is a modelling transformation: it yields the acyclic
variant of an application mapped "with few communication loops", not a
behaviour-preserving rewrite.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import itertools
import logging
import math

from builtins import object, range
from collections import Counter, OrderedDict, namedtuple

import networkx as nx

from .core import (EnumerationOverflowError, GenerationError,
                   UnsupportedAnalysisError, ValidationError)
from .fifo import DEFAULT_FIFO_CAPACITY

logger = logging.getLogger(__name__)

## @brief Maximum number of elementary cycles enumerated before giving up.
DEFAULT_CYCLE_BOUND = 10 ** 4

# Interconnect kinds
POINT_TO_POINT, SHARED_BUS = "point_to_point", "shared_bus"
INTERCONNECTS = (POINT_TO_POINT, SHARED_BUS)


class TaskNode(namedtuple("TaskNode", "id compute_cycles consume produce seed")):
    """A dataflow actor mapped onto one PE.

    Parameters
    ----------
    id : str
        Node identifier.
    compute_cycles : int or (int, int)
        Cycles per firing, or an inclusive (min, max) range drawn uniformly
        per firing from a generator seeded with ``seed``.
    consume : tuple of (port, rate) pairs
        Tokens consumed per firing on each input port.
    produce : tuple of (port, rate) pairs
        Tokens produced per firing on each output port.
    seed : int or None
        Seed for variable compute cycles.
    """

    __slots__ = ()

    def __new__(cls, id, compute_cycles, consume=(), produce=(), seed=None):
        if isinstance(compute_cycles, list):
            compute_cycles = tuple(compute_cycles)
        consume = tuple((p, int(k)) for p, k in _pairs(consume))
        produce = tuple((p, int(k)) for p, k in _pairs(produce))
        return super(TaskNode, cls).__new__(cls, id, compute_cycles, consume,
                                            produce, seed)

    @property
    def is_variable(self):
        return isinstance(self.compute_cycles, tuple)

    @property
    def expected_cycles(self):
        """Mean compute cycles per firing."""
        if self.is_variable:
            lo, hi = self.compute_cycles
            return (lo + hi) / 2
        return self.compute_cycles

    @property
    def in_ports(self):
        return [p for p, _ in self.consume]

    @property
    def out_ports(self):
        return [p for p, _ in self.produce]

    def with_ports(self, consume=None, produce=None):
        return TaskNode(self.id, self.compute_cycles,
                        self.consume if consume is None else consume,
                        self.produce if produce is None else produce, self.seed)


def _pairs(rates):
    if hasattr(rates, "items"):
        return list(rates.items())
    return list(rates)


class Channel(namedtuple("Channel",
                         "id src src_port dst dst_port capacity initial_tokens")):
    """A point-to-point link from an output port to an input port."""

    __slots__ = ()

    def __new__(cls, id, src, src_port, dst, dst_port,
                capacity=DEFAULT_FIFO_CAPACITY, initial_tokens=0):
        return super(Channel, cls).__new__(cls, id, src, src_port, dst, dst_port,
                                           capacity, initial_tokens)


class Mapping(namedtuple("Mapping",
                         "placement mesh_dims interconnect adjacency_check")):
    """Placement of nodes onto a W x H mesh of PEs.

    Parameters
    ----------
    placement : dict
        Node id to (x, y).
    mesh_dims : (int, int)
        Mesh width and height.
    interconnect : str
        ``"point_to_point"`` or ``"shared_bus"``.
    adjacency_check : bool
        Whether every channel must join mesh neighbours.
    """

    __slots__ = ()

    def __new__(cls, placement, mesh_dims, interconnect=POINT_TO_POINT,
                adjacency_check=True):
        return super(Mapping, cls).__new__(cls, dict(placement), tuple(mesh_dims),
                                           interconnect, bool(adjacency_check))


class TaskGraph(object):
    """Nodes, channels and the sinks at which throughput is measured.

    Parameters
    ----------
    nodes : iterable of :class:`TaskNode`
        In PE order; the position of a node is its domain id.
    channels : iterable of :class:`Channel`
    sinks : iterable of str, optional
        Defaults to the nodes without output ports.
    """

    def __init__(self, nodes, channels, sinks=None):
        self.nodes = OrderedDict((n.id, n) for n in nodes)
        self.channels = OrderedDict((c.id, c) for c in sorted(channels,
                                                              key=lambda c: c.id))
        if sinks is None:
            sinks = [n.id for n in self.nodes.values() if not n.produce]
        self.sinks = tuple(sinks)

    def __eq__(self, other):
        if not isinstance(other, TaskGraph):
            return NotImplemented
        return (list(self.nodes.values()) == list(other.nodes.values())
                and list(self.channels.values()) == list(other.channels.values())
                and self.sinks == other.sinks)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __repr__(self):
        return "<TaskGraph %d nodes %d channels sinks=%s>" % (
            len(self.nodes), len(self.channels), list(self.sinks))

    @property
    def sources(self):
        """Nodes that inject tokens (no input ports)."""
        return tuple(n.id for n in self.nodes.values() if not n.consume)

    def index_of(self, node_id):
        return list(self.nodes).index(node_id)

    def in_channels(self, node_id):
        return [c for c in self.channels.values() if c.dst == node_id]

    def out_channels(self, node_id):
        return [c for c in self.channels.values() if c.src == node_id]

    def is_unit_rate(self):
        return all(k == 1 for n in self.nodes.values()
                   for _, k in n.consume + n.produce)

    def to_networkx(self):
        """MultiDiGraph with one edge per channel, keyed by channel id."""
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.nodes)
        for c in self.channels.values():
            g.add_edge(c.src, c.dst, key=c.id)
        return g

    def without_channels(self, channel_ids):
        """Copy of the graph with channels and their ports removed."""
        drop = set(channel_ids)
        dropped = [self.channels[c] for c in drop]
        nodes = []
        for node in self.nodes.values():
            in_gone = set(c.dst_port for c in dropped if c.dst == node.id)
            out_gone = set(c.src_port for c in dropped if c.src == node.id)
            nodes.append(node.with_ports(
                [(p, k) for p, k in node.consume if p not in in_gone],
                [(p, k) for p, k in node.produce if p not in out_gone]))
        channels = [c for c in self.channels.values() if c.id not in drop]
        return TaskGraph(nodes, channels, self.sinks)

    def with_channels(self, channels):
        return TaskGraph(self.nodes.values(), channels, self.sinks)


def validate(graph, mapping):
    """Check a graph and its mapping.

    Returns
    -------
    errors : list of str
        Every violation found; empty when the pair is valid.
    """
    errors = []
    nodes = graph.nodes
    if not graph.sinks:
        errors.append("graph has no sink")
    for sink in graph.sinks:
        if sink not in nodes:
            errors.append("sink %r is not a node" % (sink,))
    for node in nodes.values():
        cycles = node.compute_cycles
        if isinstance(cycles, tuple):
            if len(cycles) != 2 or cycles[0] < 1 or cycles[1] < cycles[0]:
                errors.append("node %r has invalid cycle range %r" % (node.id, cycles))
        elif cycles < 1:
            errors.append("node %r has compute_cycles %r < 1" % (node.id, cycles))
        for port, k in node.consume + node.produce:
            if k < 1:
                errors.append("node %r port %r has rate %r < 1" % (node.id, port, k))
    used_in, used_out = set(), set()
    for c in graph.channels.values():
        for end, port, used, declared in (
                (c.src, c.src_port, used_out, "produce"),
                (c.dst, c.dst_port, used_in, "consume")):
            if end not in nodes:
                errors.append("channel %r references missing node %r" % (c.id, end))
                continue
            if port not in [p for p, _ in getattr(nodes[end], declared)]:
                errors.append("channel %r uses undeclared port %s.%s"
                              % (c.id, end, port))
            if (end, port) in used:
                errors.append("port %s.%s is used by more than one channel"
                              % (end, port))
            used.add((end, port))
        if c.capacity < 1:
            errors.append("channel %r has capacity %r < 1" % (c.id, c.capacity))
        if not 0 <= c.initial_tokens <= max(c.capacity, 0):
            errors.append("channel %r initial tokens %r exceed capacity %r"
                          % (c.id, c.initial_tokens, c.capacity))
    for node in nodes.values():
        for port in node.in_ports:
            if (node.id, port) not in used_in:
                errors.append("input port %s.%s is not connected" % (node.id, port))
        for port in node.out_ports:
            if (node.id, port) not in used_out:
                errors.append("output port %s.%s is not connected" % (node.id, port))
    errors.extend(_validate_mapping(graph, mapping))
    return errors


def _validate_mapping(graph, mapping):
    errors = []
    width, height = mapping.mesh_dims
    if width < 1 or height < 1:
        errors.append("mesh dimensions %r must be positive" % (mapping.mesh_dims,))
    if mapping.interconnect not in INTERCONNECTS:
        errors.append("unknown interconnect %r" % (mapping.interconnect,))
    occupied = {}
    for node_id in graph.nodes:
        if node_id not in mapping.placement:
            errors.append("node %r is not placed" % (node_id,))
    for node_id, (x, y) in sorted(mapping.placement.items()):
        if node_id not in graph.nodes:
            errors.append("placement of unknown node %r" % (node_id,))
        if not (0 <= x < width and 0 <= y < height):
            errors.append("node %r at (%d, %d) lies outside the %dx%d mesh"
                          % (node_id, x, y, width, height))
        if (x, y) in occupied:
            errors.append("nodes %r and %r share PE (%d, %d)"
                          % (occupied[(x, y)], node_id, x, y))
        occupied[(x, y)] = node_id
    if mapping.adjacency_check:
        for c in graph.channels.values():
            if c.src == c.dst:
                continue
            a = mapping.placement.get(c.src)
            b = mapping.placement.get(c.dst)
            if a is None or b is None:
                continue
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                errors.append("channel %r joins non-adjacent PEs %r and %r"
                              % (c.id, a, b))
    return errors


def check(graph, mapping):
    """Raise :class:`ValidationError` listing every problem, if any."""
    errors = validate(graph, mapping)
    if errors:
        raise ValidationError(errors)


def _canonical(cycle):
    """Rotate a channel cycle so its smallest id comes first."""
    i = cycle.index(min(cycle))
    return tuple(cycle[i:] + cycle[:i])


def detect_comm_loops(graph, bound=DEFAULT_CYCLE_BOUND):
    """Enumerate the elementary directed cycles of the channel graph.

    Parallel channels between the same pair of nodes yield distinct cycles.

    Parameters
    ----------
    graph : :class:`TaskGraph`
    bound : int, optional
        Maximum number of cycles.

    Returns
    -------
    cycles : list of tuple of int
        Channel ids in traversal order, each rotated to start at its
        smallest id, sorted.

    Raises
    ------
    EnumerationOverflowError
        If more than ``bound`` cycles exist.
    """
    links = {}
    for c in graph.channels.values():
        links.setdefault((c.src, c.dst), []).append(c.id)
    simple = nx.DiGraph()
    simple.add_nodes_from(graph.nodes)
    simple.add_edges_from(links)
    cycles = []
    for node_cycle in nx.simple_cycles(simple):
        hops = list(zip(node_cycle, node_cycle[1:] + node_cycle[:1]))
        for choice in itertools.product(*[links[hop] for hop in hops]):
            cycles.append(_canonical(list(choice)))
            if len(cycles) > bound:
                raise EnumerationOverflowError(
                    "more than %d communication loops" % (bound,))
    return sorted(cycles)


def _reachable_pairs(g, sources, sinks):
    return set((s, k) for s in sources for k in sinks if s in g and k in g
               and nx.has_path(g, s, k))


def _is_critical(graph, g, channel_id, pairs):
    """Whether dropping a channel breaks a currently reachable source-sink pair."""
    c = graph.channels[channel_id]
    g.remove_edge(c.src, c.dst, key=c.id)
    try:
        return any(not nx.has_path(g, s, k) for s, k in pairs)
    finally:
        g.add_edge(c.src, c.dst, key=c.id)


def remove_feedback_channels(graph, bound=DEFAULT_CYCLE_BOUND):
    """Delete channels until the graph has no communication loop.

    Greedy: repeatedly drop the channel lying on the most remaining cycles,
    ties broken by lowest id, preferring a channel whose loss keeps every
    source able to reach every sink it reached before. A final pass puts back
    any removed channel whose return would not close a cycle, so the removal
    set is irredundant.

    Returns
    -------
    result : (:class:`TaskGraph`, list of int)
        The acyclic graph and the removed channel ids in removal order.
    """
    remaining = [set(c) for c in detect_comm_loops(graph, bound)]
    if not remaining:
        return graph, []
    g = graph.to_networkx()
    pairs = _reachable_pairs(g, graph.sources, graph.sinks)
    removed = []
    while remaining:
        counts = Counter(cid for cycle in remaining for cid in cycle)
        top = max(counts.values())
        tied = sorted(cid for cid, n in counts.items() if n == top)
        safe = [cid for cid in tied if not _is_critical(graph, g, cid, pairs)]
        pick = (safe or tied)[0]
        c = graph.channels[pick]
        g.remove_edge(c.src, c.dst, key=c.id)
        removed.append(pick)
        remaining = [cycle for cycle in remaining if pick not in cycle]
    for cid in reversed(list(removed)):
        c = graph.channels[cid]
        g.add_edge(c.src, c.dst, key=c.id)
        if nx.is_directed_acyclic_graph(g):
            removed.remove(cid)
        else:
            g.remove_edge(c.src, c.dst, key=c.id)
    logger.info("Removed %d feedback channel(s): %s", len(removed), removed)
    return graph.without_channels(removed), removed


def bottleneck_rate(graph, freqs):
    """Steady-state tokens per second at each sink of an acyclic unit-rate graph.

    Parameters
    ----------
    graph : :class:`TaskGraph`
    freqs : dict
        Node id to frequency in Hz.

    Returns
    -------
    rates : OrderedDict
        Sink id to the minimum of ``freq / expected_cycles`` over the sink
        and every node with a path to it.
    """
    g = graph.to_networkx()
    if not nx.is_directed_acyclic_graph(g):
        raise UnsupportedAnalysisError("bottleneck rate needs an acyclic graph")
    if not graph.is_unit_rate():
        raise UnsupportedAnalysisError("bottleneck rate needs unit consume/produce rates")
    rates = OrderedDict()
    for sink in graph.sinks:
        upstream = nx.ancestors(g, sink) | set([sink])
        rates[sink] = min(freqs[n] / graph.nodes[n].expected_cycles for n in upstream)
    return rates


# Generators

def _snake(n, width):
    """Boustrophedon placement keeping consecutive indices mesh-adjacent."""
    spots = []
    for i in range(n):
        row, col = divmod(i, width)
        spots.append((col if row % 2 == 0 else width - 1 - col, row))
    return spots


def _parse_cycles(value, count):
    """Per-stage cycles from an int, an ``lo..hi`` range or ``a/b/c`` list."""
    if isinstance(value, int):
        return [value] * count
    if isinstance(value, tuple):
        return [value] * count
    if isinstance(value, list):
        parts = value
    else:
        text = str(value)
        try:
            if ".." in text and "/" not in text:
                lo, hi = (int(v) for v in text.split(".."))
                return [(lo, hi)] * count
            parts = [int(v) for v in text.split("/")]
        except ValueError:
            raise GenerationError("could not parse cycles %r" % (value,))
    if len(parts) == 1:
        return list(parts) * count
    if len(parts) != count:
        raise GenerationError("expected %d cycle values but got %d" % (count, len(parts)))
    return list(parts)


def _check_params(kind, params, allowed):
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise GenerationError("unknown %s parameter(s) %s (expected %s)"
                              % (kind, unknown, sorted(allowed)))
    merged = dict(allowed)
    merged.update(params)
    return merged


def _positive(kind, name, value, minimum=1):
    if not isinstance(value, int) or value < minimum:
        raise GenerationError("%s parameter %s must be an integer >= %d, got %r"
                              % (kind, name, minimum, value))
    return value


def fir_chain(params, seed):
    """N-stage linear pipeline; ``lanes`` independent copies side by side."""
    p = _check_params("fir_chain", params,
                      {"n": 4, "cycles": 10, "lanes": 1,
                       "capacity": DEFAULT_FIFO_CAPACITY})
    n = _positive("fir_chain", "n", p["n"])
    lanes = _positive("fir_chain", "lanes", p["lanes"])
    capacity = _positive("fir_chain", "capacity", p["capacity"])
    cycles = _parse_cycles(p["cycles"], n)
    nodes, channels, placement = [], [], {}
    width = int(math.ceil(math.sqrt(n)))
    spots = _snake(n, width)
    for lane in range(lanes):
        names = ["fir%d" % i if lanes == 1 else "fir%d_%d" % (lane, i)
                 for i in range(n)]
        for i, name in enumerate(names):
            nodes.append(TaskNode(name, cycles[i],
                                  [("in", 1)] if i > 0 else [],
                                  [("out", 1)] if i < n - 1 else [],
                                  seed * 1000 + lane * n + i))
            placement[name] = spots[i] if lanes == 1 else (i, lane)
        for a, b in zip(names, names[1:]):
            channels.append(Channel(len(channels), a, "out", b, "in", capacity))
    if lanes == 1:
        dims = (width, int(math.ceil(n / width)))
    else:
        dims = (n, lanes)
    return TaskGraph(nodes, channels), Mapping(placement, dims)


def fft_dag(params, seed):
    """Radix-2 butterfly network of log2(M) stages between a source and a sink."""
    p = _check_params("fft_dag", params,
                      {"m": 8, "cycles": 10, "capacity": DEFAULT_FIFO_CAPACITY})
    m = _positive("fft_dag", "m", p["m"], minimum=2)
    if m & (m - 1):
        raise GenerationError("fft_dag parameter m must be a power of two, got %d" % m)
    capacity = _positive("fft_dag", "capacity", p["capacity"])
    stages = m.bit_length() - 1
    half = m // 2
    cycles = _parse_cycles(p["cycles"], 1)[0]
    names = dict(((s, k), "bf%d_%d" % (s, k)) for s in range(stages)
                 for k in range(half))
    nodes = [TaskNode("src", cycles, [], [("o%d" % i, 1) for i in range(m)],
                      seed * 1000)]
    channels = []

    def link(src, sport, dst, dport):
        channels.append(Channel(len(channels), src, sport, dst, dport, capacity))

    for s in range(stages):
        for k in range(half):
            nodes.append(TaskNode(names[(s, k)], cycles, [("a", 1), ("b", 1)],
                                  [("x", 1), ("y", 1)], seed * 1000 + len(nodes)))
    nodes.append(TaskNode("sink", cycles, [("i%d" % i, 1) for i in range(m)], [],
                          seed * 1000 + len(nodes)))
    for k in range(half):
        link("src", "o%d" % k, names[(0, k)], "a")
        link("src", "o%d" % (k + half), names[(0, k)], "b")
    for s in range(1, stages):
        bit = 1 << (s - 1)
        for k in range(half):
            link(names[(s - 1, k)], "x", names[(s, k)], "a")
            link(names[(s - 1, k)], "y", names[(s, k ^ bit)], "b")
    for k in range(half):
        link(names[(stages - 1, k)], "x", "sink", "i%d" % (2 * k))
        link(names[(stages - 1, k)], "y", "sink", "i%d" % (2 * k + 1))
    placement = {"src": (0, 0), "sink": (0, stages + 1)}
    for (s, k), name in names.items():
        placement[name] = (k, s + 1)
    mapping = Mapping(placement, (half, stages + 2), adjacency_check=False)
    return TaskGraph(nodes, channels), mapping


def iir_feedback(params, seed):
    """Pipeline whose last stage feeds back into the second, closing one loop.

    The feedback channel starts with ``initial`` tokens (default 1) so the
    loop can make progress.
    """
    p = _check_params("iir_feedback", params,
                      {"n": 3, "cycles": 10, "initial": 1,
                       "capacity": DEFAULT_FIFO_CAPACITY})
    n = _positive("iir_feedback", "n", p["n"], minimum=2)
    capacity = _positive("iir_feedback", "capacity", p["capacity"])
    initial = _positive("iir_feedback", "initial", p["initial"], minimum=1)
    if initial > capacity:
        raise GenerationError("iir_feedback initial tokens exceed capacity")
    cycles = _parse_cycles(p["cycles"], n)
    names = ["iir%d" % i for i in range(n)]
    nodes = []
    for i, name in enumerate(names):
        consume = [("in", 1)] if i > 0 else []
        produce = [("out", 1)] if i < n - 1 else []
        if i == 1:
            consume.append(("fb", 1))
        if i == n - 1:
            produce.append(("fb", 1))
        nodes.append(TaskNode(name, cycles[i], consume, produce, seed * 1000 + i))
    channels = [Channel(i, a, "out", b, "in", capacity)
                for i, (a, b) in enumerate(zip(names, names[1:]))]
    channels.append(Channel(len(channels), names[-1], "fb", names[1], "fb",
                            capacity, initial))
    width = int(math.ceil(math.sqrt(n)))
    placement = dict(zip(names, _snake(n, width)))
    mapping = Mapping(placement, (width, int(math.ceil(n / width))),
                      adjacency_check=False)
    return TaskGraph(nodes, channels, sinks=[names[-1]]), mapping


## @brief Stage names and default cycle ranges of the MJPEG decoder model.
MJPEG_STAGES = (("vld", (20, 60)), ("iqzz", (10, 20)), ("idct", (40, 80)),
                ("cc", (15, 30)))


def mjpeg_pipeline(params, seed):
    """Four-stage decoder model with seeded variable cost per firing."""
    p = _check_params("mjpeg_pipeline", params,
                      {"capacity": DEFAULT_FIFO_CAPACITY, "scale": 1})
    capacity = _positive("mjpeg_pipeline", "capacity", p["capacity"])
    scale = _positive("mjpeg_pipeline", "scale", p["scale"])
    nodes, channels = [], []
    for i, (name, (lo, hi)) in enumerate(MJPEG_STAGES):
        nodes.append(TaskNode(name, (lo * scale, hi * scale),
                              [("in", 1)] if i > 0 else [],
                              [("out", 1)] if i < len(MJPEG_STAGES) - 1 else [],
                              seed * 1000 + i))
    for a, b in zip(nodes, nodes[1:]):
        channels.append(Channel(len(channels), a.id, "out", b.id, "in", capacity))
    placement = dict((n.id, (i, 0)) for i, n in enumerate(nodes))
    return TaskGraph(nodes, channels), Mapping(placement, (len(nodes), 1))


def adpcm_chain(params, seed):
    """Two fixed-cost stages, encoder then decoder."""
    p = _check_params("adpcm_chain", params,
                      {"cycles": "24/16", "capacity": DEFAULT_FIFO_CAPACITY})
    capacity = _positive("adpcm_chain", "capacity", p["capacity"])
    enc, dec = _parse_cycles(p["cycles"], 2)
    for c in (enc, dec):
        if isinstance(c, tuple):
            raise GenerationError("adpcm_chain stages have fixed cost")
    nodes = [TaskNode("adpcm_enc", enc, [], [("out", 1)], seed * 1000),
             TaskNode("adpcm_dec", dec, [("in", 1)], [], seed * 1000 + 1)]
    channels = [Channel(0, "adpcm_enc", "out", "adpcm_dec", "in", capacity)]
    placement = {"adpcm_enc": (0, 0), "adpcm_dec": (1, 0)}
    return TaskGraph(nodes, channels), Mapping(placement, (2, 1))


## @brief Mapping from generator kind to generator function.
GENERATORS = OrderedDict([
    ("fir_chain", fir_chain),
    ("fft_dag", fft_dag),
    ("iir_feedback", iir_feedback),
    ("mjpeg_pipeline", mjpeg_pipeline),
    ("adpcm_chain", adpcm_chain),
])


def generate(kind, params=None, seed=0):
    """Build a synthetic workload and its mapping.

    Parameters
    ----------
    kind : str
        One of ``fir_chain``, ``fft_dag``, ``iir_feedback``,
        ``mjpeg_pipeline`` or ``adpcm_chain``.
    params : dict or sequence of pairs, optional
        Kind-specific parameters.
    seed : int, optional
        Seed for any random choices.

    Returns
    -------
    (graph, mapping) : (:class:`TaskGraph`, :class:`Mapping`)
        A pure function of (kind, params, seed).
    """
    if kind not in GENERATORS:
        raise GenerationError("Unknown graph kind '%s'. Known kinds are %s."
                              % (kind, list(GENERATORS)))
    params = dict(params or {})
    graph, mapping = GENERATORS[kind](params, int(seed))
    logger.debug("Generated %s %r: %r", kind, params, graph)
    return graph, mapping
