# test_taskgraph.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Tests for the taskgraph module."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import unittest

from builtins import range

from hypothesis import given, settings
from hypothesis import strategies as st

from galscmp.core import (EnumerationOverflowError, GenerationError,
                          UnsupportedAnalysisError, ValidationError)
from galscmp.taskgraph import (SHARED_BUS, Channel, Mapping, TaskGraph, TaskNode,
                               bottleneck_rate, check, detect_comm_loops,
                               generate, remove_feedback_channels, validate)
from galscmp.testutils import brute_force_cycles

MHZ = 10 ** 6


def _graph(node_count, edges):
    """Graph with one dedicated port pair per channel."""
    names = ["v%d" % i for i in range(node_count)]
    consume = dict((n, []) for n in names)
    produce = dict((n, []) for n in names)
    channels = []
    for cid, (a, b) in enumerate(edges):
        src, dst = names[a], names[b]
        produce[src].append(("o%d" % cid, 1))
        consume[dst].append(("i%d" % cid, 1))
        channels.append(Channel(cid, src, "o%d" % cid, dst, "i%d" % cid))
    nodes = [TaskNode(n, 10, consume[n], produce[n]) for n in names]
    return TaskGraph(nodes, channels, sinks=[names[-1]])


def _chain(*cycles):
    names = ["n%d" % i for i in range(len(cycles))]
    nodes = [TaskNode(name, c, [("in", 1)] if i else [],
                      [("out", 1)] if i < len(cycles) - 1 else [])
             for i, (name, c) in enumerate(zip(names, cycles))]
    channels = [Channel(i, a, "out", b, "in")
                for i, (a, b) in enumerate(zip(names, names[1:]))]
    mapping = Mapping(dict((n, (i, 0)) for i, n in enumerate(names)),
                      (len(names), 1))
    return TaskGraph(nodes, channels), mapping


class TestTaskGraph(unittest.TestCase):

    def test_node(self):
        node = TaskNode("a", (40, 80), {"in": 1}, [("out", 2)])
        self.assertTrue(node.is_variable)
        self.assertEqual(node.expected_cycles, 60)
        self.assertEqual(node.consume, (("in", 1),))
        self.assertEqual(node.out_ports, ["out"])
        self.assertEqual(TaskNode("b", [3, 5], (), ()).compute_cycles, (3, 5))

    def test_structure(self):
        graph, _ = _chain(10, 20, 30)
        self.assertEqual(graph.sinks, ("n2",))
        self.assertEqual(graph.sources, ("n0",))
        self.assertEqual([c.id for c in graph.in_channels("n1")], [0])
        self.assertEqual([c.id for c in graph.out_channels("n1")], [1])
        self.assertEqual(graph.index_of("n2"), 2)
        self.assertTrue(graph.is_unit_rate())
        self.assertEqual(graph.to_networkx().number_of_edges(), 2)
        self.assertEqual(graph, _chain(10, 20, 30)[0])
        self.assertNotEqual(graph, _chain(10, 20, 31)[0])

    def test_without_channels(self):
        graph, _ = _chain(10, 20, 30)
        smaller = graph.without_channels([1])
        self.assertEqual(list(smaller.channels), [0])
        self.assertEqual(smaller.nodes["n1"].produce, ())
        self.assertEqual(smaller.nodes["n2"].consume, ())
        self.assertEqual(smaller.sinks, graph.sinks)

    def test_valid_chain(self):
        graph, mapping = _chain(10, 20)
        self.assertEqual(validate(graph, mapping), [])
        check(graph, mapping)

    def test_validation_collects_every_error(self):
        nodes = [TaskNode("a", 0, [], [("out", 1), ("spare", 1)]),
                 TaskNode("b", 5, [("in", 1)], [])]
        channels = [Channel(0, "a", "bogus", "b", "in", capacity=2, initial_tokens=3)]
        mapping = Mapping({"a": (0, 0), "b": (2, 0)}, (2, 1), interconnect="mesh")
        errors = validate(TaskGraph(nodes, channels), mapping)
        expected = ["node 'a' has compute_cycles 0 < 1",
                    "channel 0 uses undeclared port a.bogus",
                    "channel 0 initial tokens 3 exceed capacity 2",
                    "output port a.out is not connected",
                    "output port a.spare is not connected",
                    "unknown interconnect 'mesh'",
                    "node 'b' at (2, 0) lies outside the 2x1 mesh",
                    "channel 0 joins non-adjacent PEs (0, 0) and (2, 0)"]
        self.assertEqual(errors, expected)
        with self.assertRaises(ValidationError) as cm:
            check(TaskGraph(nodes, channels), mapping)
        self.assertEqual(cm.exception.errors, expected)

    def test_shared_pe_and_missing_sink(self):
        graph = TaskGraph([TaskNode("a", 1, [], [("out", 1)]),
                           TaskNode("b", 1, [("in", 1)], [("out", 1)])],
                          [Channel(0, "a", "out", "b", "in")], sinks=[])
        mapping = Mapping({"a": (0, 0), "b": (0, 0)}, (1, 1), SHARED_BUS, False)
        errors = validate(graph, mapping)
        self.assertIn("graph has no sink", errors)
        self.assertIn("nodes 'a' and 'b' share PE (0, 0)", errors)
        self.assertIn("output port b.out is not connected", errors)


class TestCommLoops(unittest.TestCase):

    def test_chain_has_no_loops(self):
        self.assertEqual(detect_comm_loops(_chain(1, 2, 3)[0]), [])

    def test_parallel_channels(self):
        graph = _graph(2, [(0, 1), (0, 1), (1, 0)])
        self.assertEqual(detect_comm_loops(graph), [(0, 2), (1, 2)])

    def test_self_loop(self):
        graph = _graph(2, [(0, 1), (1, 1)])
        self.assertEqual(detect_comm_loops(graph), [(1,)])

    def test_overflow(self):
        edges = [(a, b) for a in range(4) for b in range(4) if a != b]
        self.assertRaises(EnumerationOverflowError, detect_comm_loops,
                          _graph(4, edges), bound=3)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))))
    def test_matches_brute_force(self, case):
        graph = _graph(*case)
        self.assertEqual(detect_comm_loops(graph), brute_force_cycles(graph))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8))))
    def test_removal_is_acyclic_and_irredundant(self, case):
        graph = _graph(*case)
        acyclic, removed = remove_feedback_channels(graph)
        self.assertEqual(detect_comm_loops(acyclic), [])
        self.assertEqual(len(acyclic.channels) + len(removed), len(graph.channels))
        for cid in removed:
            kept = [c for c in graph.channels.values()
                    if c.id not in removed or c.id == cid]
            self.assertNotEqual(detect_comm_loops(graph.with_channels(kept)), [])

    def test_iir_feedback_keeps_forward_path(self):
        graph, _ = generate("iir_feedback", {"n": 3})
        self.assertEqual(detect_comm_loops(graph), [(1, 2)])
        acyclic, removed = remove_feedback_channels(graph)
        self.assertEqual(removed, [2])
        self.assertEqual(list(acyclic.channels), [0, 1])
        self.assertEqual(acyclic.nodes["iir1"].consume, (("in", 1),))

    def test_acyclic_graph_unchanged(self):
        graph = _chain(1, 2)[0]
        self.assertEqual(remove_feedback_channels(graph), (graph, []))


class TestBottleneck(unittest.TestCase):

    def test_chain(self):
        graph, _ = _chain(10, 20)
        rates = bottleneck_rate(graph, {"n0": 100 * MHZ, "n1": 100 * MHZ})
        self.assertEqual(rates["n1"], 5 * MHZ)
        rates = bottleneck_rate(graph, {"n0": 100 * MHZ, "n1": 400 * MHZ})
        self.assertEqual(rates["n1"], 10 * MHZ)

    def test_unsupported(self):
        graph, _ = generate("iir_feedback")
        freqs = dict((n, MHZ) for n in graph.nodes)
        self.assertRaises(UnsupportedAnalysisError, bottleneck_rate, graph, freqs)
        multi = TaskGraph([TaskNode("a", 1, [], [("o", 2)]),
                           TaskNode("b", 1, [("i", 1)], [])],
                          [Channel(0, "a", "o", "b", "i")])
        self.assertRaises(UnsupportedAnalysisError, bottleneck_rate, multi,
                          {"a": MHZ, "b": MHZ})


class TestGenerators(unittest.TestCase):

    def test_fir_chain(self):
        graph, mapping = generate("fir_chain", {"n": 4, "cycles": 64})
        self.assertEqual(list(graph.nodes), ["fir0", "fir1", "fir2", "fir3"])
        self.assertEqual(graph.sinks, ("fir3",))
        self.assertEqual(mapping.mesh_dims, (2, 2))
        self.assertEqual(validate(graph, mapping), [])
        lanes, mapping = generate("fir_chain", {"n": 2, "lanes": 3})
        self.assertEqual(len(lanes.nodes), 6)
        self.assertEqual(len(lanes.sinks), 3)
        self.assertEqual(validate(lanes, mapping), [])

    def test_fft_dag(self):
        graph, mapping = generate("fft_dag", {"m": 8})
        self.assertEqual(len(graph.nodes), 14)
        self.assertEqual(len(graph.channels), 32)
        self.assertEqual(graph.sinks, ("sink",))
        self.assertEqual(validate(graph, mapping), [])
        self.assertEqual(detect_comm_loops(graph), [])
        graph, _ = generate("fft_dag", {"m": 8}, seed=3)
        seeds = [n.seed for n in graph.nodes.values()]
        self.assertEqual(seeds, list(range(3000, 3014)))
        self.assertEqual(graph.nodes["src"].seed, 3000)
        self.assertEqual(graph.nodes["sink"].seed, 3013)

    def test_other_kinds(self):
        for kind in ("iir_feedback", "mjpeg_pipeline", "adpcm_chain"):
            graph, mapping = generate(kind)
            self.assertEqual(validate(graph, mapping), [], kind)
        graph, _ = generate("mjpeg_pipeline", seed=3)
        self.assertTrue(all(n.is_variable for n in graph.nodes.values()))
        graph, _ = generate("adpcm_chain")
        self.assertEqual([n.compute_cycles for n in graph.nodes.values()], [24, 16])

    def test_cycle_lists(self):
        graph, _ = generate("fir_chain", {"n": 3, "cycles": "5/6/7"})
        self.assertEqual([n.compute_cycles for n in graph.nodes.values()], [5, 6, 7])
        graph, _ = generate("fir_chain", {"n": 2, "cycles": "40..80"})
        self.assertEqual(graph.nodes["fir0"].compute_cycles, (40, 80))

    def test_deterministic(self):
        first = generate("mjpeg_pipeline", {"scale": 2}, seed=5)
        second = generate("mjpeg_pipeline", {"scale": 2}, seed=5)
        self.assertEqual(first, second)

    def test_bad_parameters(self):
        self.assertRaises(GenerationError, generate, "torus")
        self.assertRaises(GenerationError, generate, "fir_chain", {"depth": 3})
        self.assertRaises(GenerationError, generate, "fir_chain", {"n": 0})
        self.assertRaises(GenerationError, generate, "fft_dag", {"m": 6})
        self.assertRaises(GenerationError, generate, "fir_chain",
                          {"n": 3, "cycles": "1/2"})
        self.assertRaises(GenerationError, generate, "iir_feedback",
                          {"initial": 5, "capacity": 2})
