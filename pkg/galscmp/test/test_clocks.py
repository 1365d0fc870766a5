# test_clocks.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Tests for the clocks module."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import unittest

from builtins import range

from hypothesis import given, settings
from hypothesis import strategies as st

from galscmp.clocks import ClockDomain, SyncConfig, default_levels, sync_observe
from galscmp.core import ConfigError, FrequencyError, Interval

MHZ = 10 ** 6
NS = 10 ** 6


class TestLevels(unittest.TestCase):

    def test_default_levels(self):
        levels = default_levels(50 * MHZ, 400 * MHZ, 16)
        self.assertEqual(len(levels), 16)
        self.assertEqual(levels[0], 50 * MHZ)
        self.assertEqual(levels[-1], 400 * MHZ)
        self.assertEqual(list(levels), sorted(levels))
        self.assertEqual(default_levels(1, 1, 4), (1,))
        self.assertEqual(default_levels(10, 20, 1), (20,))
        self.assertRaises(ConfigError, default_levels, 10, 20, 0)
        self.assertRaises(ConfigError, default_levels, 20, 10, 4)

    def test_domain_defaults(self):
        d = ClockDomain("a", 100 * MHZ)
        self.assertEqual(d.f_max, 100 * MHZ)
        self.assertEqual(d.f_min, 12500000)
        self.assertEqual(len(d.levels), 16)
        self.assertEqual(d.frequency, 100 * MHZ)

    def test_bad_domains(self):
        self.assertRaises(FrequencyError, ClockDomain, "a", 100 * MHZ,
                          levels=(50 * MHZ,))
        self.assertRaises(ConfigError, ClockDomain, "a", 100 * MHZ, levels=())
        self.assertRaises(ConfigError, ClockDomain, "a", 100 * MHZ, phase=-1)
        self.assertRaises(ConfigError, ClockDomain, "a", 100 * MHZ,
                          levels=(50 * MHZ, 100 * MHZ), f_max=80 * MHZ)


class TestClockDomain(unittest.TestCase):

    def setUp(self):
        self.domain = ClockDomain("a", 100 * MHZ, levels=(50 * MHZ, 100 * MHZ))

    def test_edges(self):
        d = self.domain
        self.assertEqual(d.edge_at(0), 0)
        self.assertEqual(d.edge_at(3), 30 * NS)
        self.assertEqual(d.index_of_next_edge(10 * NS), 1)
        self.assertEqual(d.index_of_next_edge(10 * NS, strict=True), 2)
        self.assertEqual(d.index_of_next_edge(1), 1)
        self.assertEqual(d.next_edge_after(15 * NS), 20 * NS)
        self.assertTrue(d.is_edge(20 * NS))
        self.assertFalse(d.is_edge(21 * NS))
        self.assertRaises(ValueError, d.edge_at, -1)
        self.assertRaises(ValueError, d.next_edge_after, -1)

    def test_phase(self):
        d = ClockDomain("b", 100 * MHZ, phase=5)
        self.assertEqual(d.edge_at(0), 5)
        self.assertEqual(d.next_edge_after(0), 5)
        self.assertEqual(d.index_of_next_edge(6), 1)

    def test_set_frequency(self):
        d = self.domain
        effective = d.set_frequency(50 * MHZ, 25 * NS)
        self.assertEqual(effective, 30 * NS)
        self.assertEqual(d.edge_at(2), 20 * NS)
        self.assertEqual(d.edge_at(3), 30 * NS)
        self.assertEqual(d.edge_at(4), 50 * NS)
        self.assertEqual(d.frequency_at(20 * NS), 100 * MHZ)
        self.assertEqual(d.frequency_at(40 * NS), 50 * MHZ)
        self.assertEqual(d.frequency, 50 * MHZ)
        self.assertEqual(d.history[-1], (25 * NS, 50 * MHZ, 30 * NS))
        self.assertEqual(d.frequency_trace(0, 100 * NS),
                         [(Interval(0, 30 * NS), 100 * MHZ),
                          (Interval(30 * NS, 100 * NS), 50 * MHZ)])
        self.assertEqual(d.frequency_trace(40 * NS, 60 * NS),
                         [(Interval(40 * NS, 60 * NS), 50 * MHZ)])

    def test_command_on_edge_waits_for_next(self):
        self.assertEqual(self.domain.set_frequency(50 * MHZ, 30 * NS), 40 * NS)

    def test_rejected_commands(self):
        d = self.domain
        self.assertRaises(FrequencyError, d.set_frequency, 70 * MHZ, 0)
        d.set_frequency(50 * MHZ, 25 * NS)
        self.assertRaises(ValueError, d.set_frequency, 100 * MHZ, 5 * NS)

    def test_same_frequency_adds_no_segment(self):
        d = self.domain
        d.set_frequency(100 * MHZ, 25 * NS)
        self.assertEqual(len(d.segments), 1)

    def test_pending_switch_replaced(self):
        d = self.domain
        d.set_frequency(50 * MHZ, 25 * NS)
        d.set_frequency(100 * MHZ, 26 * NS)
        self.assertEqual(len(d.segments), 1)
        self.assertEqual(d.edge_at(5), 50 * NS)

    def test_switch_on_first_edge(self):
        d = ClockDomain("c", 100 * MHZ, levels=(50 * MHZ, 100 * MHZ), phase=10)
        self.assertEqual(d.set_frequency(50 * MHZ, 0), 10)
        self.assertEqual(len(d.segments), 1)
        self.assertEqual(d.edge_at(1), 10 + 20 * NS)
        self.assertEqual(d.frequency_trace(0, 50 * NS),
                         [(Interval(0, 50 * NS), 50 * MHZ)])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from([25, 50, 75, 100]),
                              st.integers(0, 200 * NS)), max_size=8),
           st.integers(0, 40 * NS))
    def test_edges_monotonic_and_stable(self, commands, phase):
        d = ClockDomain("p", 100 * MHZ, levels=[f * MHZ for f in (25, 50, 75, 100)],
                        phase=phase)
        t = 0
        for f, step in commands:
            t += step
            before = []
            n = 0
            while d.edge_at(n) <= t:
                before.append(d.edge_at(n))
                n += 1
            effective = d.set_frequency(f * MHZ, t)
            self.assertGreater(effective, t)
            self.assertTrue(d.is_edge(effective))
            self.assertEqual([d.edge_at(i) for i in range(len(before))], before)
        edges = [d.edge_at(i) for i in range(60)]
        self.assertTrue(all(a < b for a, b in zip(edges, edges[1:])))
        trace = d.frequency_trace(0, edges[-1])
        self.assertEqual(trace[0][0].start, 0)
        self.assertEqual(trace[-1][0].end, edges[-1])
        for (a, _), (b, _) in zip(trace, trace[1:]):
            self.assertEqual(a.end, b.start)


class TestSync(unittest.TestCase):

    def test_sync_observe(self):
        dst = ClockDomain("d", 100 * MHZ)
        self.assertEqual(sync_observe(5, dst, SyncConfig(2)), 20 * NS)
        self.assertEqual(sync_observe(10 * NS, dst, SyncConfig(1)), 20 * NS)
        self.assertEqual(sync_observe(10 * NS, dst, 3), 40 * NS)
        self.assertEqual(sync_observe(7, dst, SyncConfig(0)), 7)
        self.assertRaises(ValueError, sync_observe, -1, dst, 2)

    def test_sync_config(self):
        self.assertEqual(SyncConfig().stages, 2)
        self.assertRaises(ConfigError, SyncConfig, -1)
        self.assertRaises(ConfigError, SyncConfig, 1.5)
