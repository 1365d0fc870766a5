# test_fifo.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Tests for the fifo module."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import unittest

import mock

from hypothesis import given, settings
from hypothesis import strategies as st

from galscmp.clocks import ClockDomain, SyncConfig
from galscmp.core import ConfigError, MisalignedEdgeError
from galscmp.fifo import (HANDSHAKE, POP, PUSH, READER, RESERVE, WRITER,
                          DualClockFifo, FifoEvent, Token)
from galscmp.testutils import drive_fifo

MHZ = 10 ** 6
NS = 10 ** 6


def _fifo(capacity=2, stages=2, **kwargs):
    w = ClockDomain("w", 100 * MHZ)
    r = ClockDomain("r", 100 * MHZ)
    return DualClockFifo(capacity, w, r, read_sync=SyncConfig(stages), name="f",
                         **kwargs)


class TestDualClockFifo(unittest.TestCase):

    def test_bad_config(self):
        self.assertRaises(ConfigError, _fifo, capacity=0)
        self.assertRaises(ConfigError, _fifo, capacity=2, initial_tokens=3)
        self.assertRaises(ConfigError, _fifo, flow_control="credit")

    def test_reader_sees_push_after_sync(self):
        fifo = _fifo()
        self.assertTrue(fifo.try_push(fifo.make_token(), 0))
        self.assertEqual(fifo.true_occupancy(0), 1)
        self.assertEqual(fifo.observed_occupancy(READER, 10 * NS), 0)
        self.assertEqual(fifo.next_visible_change(READER, 0), 20 * NS)
        self.assertIsNone(fifo.try_pop(10 * NS))
        self.assertEqual(fifo.try_pop(20 * NS), Token(0))
        self.assertIsNone(fifo.next_visible_change(READER, 20 * NS))
        self.assertEqual(fifo.pushed, 1)
        self.assertEqual(fifo.popped, 1)
        self.assertEqual(len(fifo), 0)

    def test_writer_sees_pop_after_sync(self):
        fifo = _fifo(capacity=2)
        fifo.try_push(fifo.make_token(), 0)
        fifo.try_push(fifo.make_token(), 10 * NS)
        self.assertFalse(fifo.try_push(fifo.make_token(), 20 * NS))
        fifo.try_pop(20 * NS)
        self.assertEqual(fifo.observed_occupancy(WRITER, 30 * NS), 2)
        self.assertEqual(fifo.next_visible_change(WRITER, 30 * NS), 40 * NS)
        self.assertFalse(fifo.try_push(fifo.make_token(), 30 * NS))
        self.assertTrue(fifo.try_push(fifo.make_token(), 40 * NS))
        self.assertEqual(fifo.write_events, [(0, 1), (10 * NS, 2), (40 * NS, 3)])
        self.assertEqual(fifo.read_events, [(20 * NS, 1)])

    def test_zero_stages(self):
        fifo = _fifo(stages=0)
        fifo.try_push(fifo.make_token(), 0)
        self.assertEqual(fifo.observed_occupancy(READER, 0), 1)
        self.assertIsNotNone(fifo.try_pop(0))

    def test_initial_tokens(self):
        fifo = _fifo(capacity=4, initial_tokens=2)
        self.assertEqual(fifo.true_occupancy(0), 2)
        self.assertTrue(fifo.can_pop(0))
        self.assertEqual(fifo.try_pop(0).seq, 0)
        self.assertEqual(fifo.make_token().seq, 2)

    def test_handshake(self):
        fifo = _fifo(capacity=4, flow_control=HANDSHAKE)
        self.assertEqual(fifo.writer_limit(), 1)
        self.assertTrue(fifo.try_push(fifo.make_token(), 0))
        self.assertFalse(fifo.try_push(fifo.make_token(), 10 * NS))

    def test_misaligned_and_out_of_order(self):
        fifo = _fifo()
        self.assertRaises(MisalignedEdgeError, fifo.try_push, fifo.make_token(), 5)
        self.assertRaises(MisalignedEdgeError, fifo.try_pop, 5)
        fifo.try_push(fifo.make_token(), 20 * NS)
        self.assertRaises(ValueError, fifo.try_push, fifo.make_token(), 10 * NS)
        self.assertRaises(ValueError, fifo.observed_occupancy, "middle", 0)
        self.assertRaises(ValueError, fifo.observed_occupancy, READER, -1)

    def test_observers(self):
        fifo = _fifo(stages=0)
        observer = mock.Mock()
        fifo.attach(observer)
        fifo.attach(observer)
        fifo.try_push(fifo.make_token(), 0)
        fifo.try_pop(10 * NS)
        self.assertEqual(observer.update.call_args_list,
                         [mock.call(fifo, FifoEvent(PUSH, 0, 1)),
                          mock.call(fifo, FifoEvent(POP, 10 * NS, 0))])
        fifo.detach(observer)
        fifo.try_push(fifo.make_token(), 20 * NS)
        self.assertEqual(observer.update.call_count, 2)

    def test_reserve_and_commit(self):
        fifo = _fifo(stages=0)
        observer = mock.Mock()
        fifo.attach(observer)
        self.assertTrue(fifo.reserve(fifo.make_token(), 0))
        self.assertEqual(fifo.in_flight, 1)
        self.assertEqual(fifo.observed_occupancy(WRITER, 0), 1)
        self.assertEqual(fifo.true_occupancy(0), 0)
        self.assertFalse(fifo.can_pop(0))
        fifo.commit(5 * NS)
        self.assertEqual(fifo.in_flight, 0)
        self.assertEqual(fifo.true_occupancy(5 * NS), 1)
        self.assertEqual([c[0][1].kind for c in observer.update.call_args_list],
                         [RESERVE, PUSH])
        self.assertRaises(ValueError, fifo.commit, 6 * NS)

    @settings(max_examples=300, deadline=None)
    @given(st.lists(st.booleans(), min_size=1, max_size=12),
           st.integers(0, 3), st.integers(1, 4))
    def test_tokens_leave_in_order(self, actions, stages, capacity):
        fifo = _fifo(capacity=capacity, stages=stages)
        _, popped = drive_fifo(fifo, actions)
        seqs = [tok.seq for tok in popped]
        self.assertEqual(seqs, sorted(seqs))
        self.assertEqual(len(set(seqs)), len(seqs))
