# fifo.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Dual-clock FIFO with synchronizer-delayed occupancy views.

The writer sees the read pointer only after it has crossed into the write
domain, and the reader sees the write pointer only after it has crossed into
the read domain. Each side therefore works from a stale occupancy: the
writer over-estimates it and the reader under-estimates it.

Pointer updates cross as whole counts, one per event, which matches the stall
behaviour of a gray-coded pointer at the same synchronizer depth.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import bisect
import logging

from builtins import object, range
from collections import deque, namedtuple

from .clocks import SyncConfig, sync_observe
from .core import ConfigError, MisalignedEdgeError

logger = logging.getLogger(__name__)

## @brief Default FIFO depth in tokens.
DEFAULT_FIFO_CAPACITY = 32

# Flow control modes
MULTIWORD, HANDSHAKE = "multiword", "handshake"
FLOW_CONTROL_MODES = (MULTIWORD, HANDSHAKE)

# FIFO sides
WRITER, READER = "writer", "reader"

# Event kinds passed to observers
PUSH, POP, RESERVE = "push", "pop", "reserve"


class Token(namedtuple("Token", "seq payload_cycles tag")):
    """A token travelling through a channel.

    Parameters
    ----------
    seq : int
        Position of the token in the channel's push order.
    payload_cycles : int or None
        Compute-cost hint for the consumer.
    tag : int or None
        Opaque user value.
    """

    __slots__ = ()

    def __new__(cls, seq, payload_cycles=None, tag=None):
        return super(Token, cls).__new__(cls, seq, payload_cycles, tag)


class FifoEvent(namedtuple("FifoEvent", "kind time occupancy")):
    """Notification sent to FIFO observers.

    ``occupancy`` is the true occupancy just after the event.
    """

    __slots__ = ()


class _CrossView(object):
    """Counts events of one side that have crossed into the other domain.

    Event times are kept sorted; the number of events visible at t is found
    by advancing a cursor for non-decreasing queries and by binary search for
    earlier ones. Both rely on sync_observe being monotone in its time.
    """

    def __init__(self, times, domain, sync):
        self._times = times
        self._domain = domain
        self._sync = sync
        self._cursor_time = -1
        self._cursor_count = 0

    def visible_time(self, i):
        return sync_observe(self._times[i], self._domain, self._sync)

    def count(self, t):
        times = self._times
        if t >= self._cursor_time:
            n = self._cursor_count
            while n < len(times) and self.visible_time(n) <= t:
                n += 1
            self._cursor_time, self._cursor_count = t, n
            return n
        lo, hi = 0, len(times)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.visible_time(mid) <= t:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def next_visible(self, t):
        """Visibility time of the first event not yet visible at t, or None."""
        n = self.count(t)
        if n < len(self._times):
            return self.visible_time(n)
        return None


class DualClockFifo(object):
    """A FIFO written in one clock domain and read in another.

    Parameters
    ----------
    capacity : int
        Number of slots, at least 1.
    write_domain, read_domain : :class:`galscmp.clocks.ClockDomain`
        Domains of the two sides.
    read_sync : :class:`SyncConfig`, optional
        Synchronizer carrying the write pointer into the read domain.
    write_sync : :class:`SyncConfig`, optional
        Synchronizer carrying the read pointer into the write domain.
        Defaults to ``read_sync``.
    initial_tokens : int, optional
        Tokens present (and visible to both sides) at time 0.
    flow_control : str, optional
        ``"multiword"`` lets the writer stream until its stale view is full;
        ``"handshake"`` allows a push only when the writer observes an
        empty FIFO, i.e. one word per acknowledged transfer.
    name : object, optional
        Identifier used in log messages.
    """

    def __init__(self, capacity, write_domain, read_domain, read_sync=None,
                 write_sync=None, initial_tokens=0, flow_control=MULTIWORD,
                 name=None):
        if capacity < 1:
            raise ConfigError("FIFO capacity must be at least 1, got %r." % (capacity,))
        if not 0 <= initial_tokens <= capacity:
            raise ConfigError("Initial tokens %r must lie in [0, %d]."
                              % (initial_tokens, capacity))
        if flow_control not in FLOW_CONTROL_MODES:
            raise ConfigError("Unknown flow control %r (expected one of %s)."
                              % (flow_control, list(FLOW_CONTROL_MODES)))
        self.capacity = capacity
        self.write_domain = write_domain
        self.read_domain = read_domain
        self.read_sync = read_sync if read_sync is not None else SyncConfig()
        self.write_sync = write_sync if write_sync is not None else self.read_sync
        self.flow_control = flow_control
        self.name = name
        self.initial_tokens = initial_tokens
        self._queue = deque(Token(seq) for seq in range(initial_tokens))
        self._next_seq = initial_tokens
        # writer-side issue times (push or bus reservation)
        self._write_times = []
        # times tokens actually entered the queue
        self._commit_times = []
        self._pop_times = []
        self._in_flight = deque()
        self._reader_view = _CrossView(self._commit_times, read_domain, self.read_sync)
        self._writer_view = _CrossView(self._pop_times, write_domain, self.write_sync)
        self._observers = []

    def __repr__(self):
        return "<DualClockFifo %r %d/%d>" % (self.name, len(self._queue), self.capacity)

    # observers

    def attach(self, observer):
        """Attach an observer with an ``update(fifo, event)`` method."""
        if observer not in self._observers:
            self._observers.append(observer)

    def detach(self, observer):
        if observer in self._observers:
            self._observers.remove(observer)

    def notify(self, event):
        """Notify all observers of a FIFO event."""
        for o in list(self._observers):
            o.update(self, event)

    # histories

    @property
    def write_events(self):
        """(time, write_count) after each token entered the queue."""
        base = self.initial_tokens
        return [(t, base + i + 1) for i, t in enumerate(self._commit_times)]

    @property
    def read_events(self):
        """(time, read_count) after each pop."""
        return [(t, i + 1) for i, t in enumerate(self._pop_times)]

    @property
    def in_flight(self):
        """Tokens accepted from the writer but not yet in the queue."""
        return len(self._in_flight)

    @property
    def pushed(self):
        return self.initial_tokens + len(self._commit_times)

    @property
    def popped(self):
        return len(self._pop_times)

    def __len__(self):
        return len(self._queue)

    # views

    def true_occupancy(self, t):
        """Tokens pushed at or before t minus tokens popped at or before t."""
        return (self.initial_tokens
                + bisect.bisect_right(self._commit_times, t)
                - bisect.bisect_right(self._pop_times, t))

    def observed_occupancy(self, side, t):
        """Occupancy as seen by one side at time t.

        Parameters
        ----------
        side : {"writer", "reader"}
            Which side is looking.
        t : int
            Observation time in femtoseconds.
        """
        if t < 0:
            raise ValueError("Time must be non-negative, got %r." % (t,))
        if side == WRITER:
            written = bisect.bisect_right(self._write_times, t)
            return self.initial_tokens + written - self._writer_view.count(t)
        elif side == READER:
            read = bisect.bisect_right(self._pop_times, t)
            return self.initial_tokens + self._reader_view.count(t) - read
        raise ValueError("Unknown FIFO side %r." % (side,))

    def next_visible_change(self, side, t):
        """Earliest time after t at which a cross-domain update reaches side.

        Returns None when every event so far is already visible at t.
        """
        if side == WRITER:
            return self._writer_view.next_visible(t)
        elif side == READER:
            return self._reader_view.next_visible(t)
        raise ValueError("Unknown FIFO side %r." % (side,))

    def writer_limit(self):
        return 1 if self.flow_control == HANDSHAKE else self.capacity

    def can_push(self, t):
        return self.observed_occupancy(WRITER, t) < self.writer_limit()

    def can_pop(self, t):
        return self.observed_occupancy(READER, t) > 0

    # operations

    def _check_edge(self, domain, t, side):
        if not domain.is_edge(t):
            raise MisalignedEdgeError("FIFO %r %s access at %d fs is not an edge of "
                                      "domain %r." % (self.name, side, t,
                                                      domain.domain_id))

    def make_token(self, payload_cycles=None, tag=None):
        """Create the next token in this channel's sequence."""
        tok = Token(self._next_seq, payload_cycles, tag)
        self._next_seq += 1
        return tok

    def try_push(self, tok, t):
        """Push a token at write-domain edge t.

        Returns
        -------
        accepted : bool
            False (with no state change) when the writer's view is full.

        Raises
        ------
        MisalignedEdgeError
            If t is not an edge of the write domain.
        """
        self._check_edge(self.write_domain, t, WRITER)
        self._check_order(self._write_times, t, "write")
        if not self.can_push(t):
            return False
        self._write_times.append(t)
        self._enqueue(tok, t)
        return True

    def reserve(self, tok, t):
        """Accept a token from the writer at edge t without queueing it yet.

        Used for transfers over a shared bus: the writer counts the token as
        written immediately, the reader sees it only after :meth:`commit`.
        """
        self._check_edge(self.write_domain, t, WRITER)
        self._check_order(self._write_times, t, "write")
        if not self.can_push(t):
            return False
        self._write_times.append(t)
        self._in_flight.append(tok)
        self.notify(FifoEvent(RESERVE, t, len(self._queue)))
        return True

    def commit(self, t):
        """Move the oldest reserved token into the queue at time t."""
        if not self._in_flight:
            raise ValueError("FIFO %r has no token in flight." % (self.name,))
        self._enqueue(self._in_flight.popleft(), t)

    def _check_order(self, times, t, what):
        if times and t < times[-1]:
            raise ValueError("FIFO %r %s at %d fs precedes previous %s at %d fs."
                             % (self.name, what, t, what, times[-1]))

    def _enqueue(self, tok, t):
        self._check_order(self._commit_times, t, "push")
        if len(self._queue) >= self.capacity:
            raise AssertionError("FIFO %r overflow at %d fs." % (self.name, t))
        self._queue.append(tok)
        self._commit_times.append(t)
        self.notify(FifoEvent(PUSH, t, len(self._queue)))

    def try_pop(self, t):
        """Pop the head token at read-domain edge t.

        Returns
        -------
        token : :class:`Token` or None
            None (with no state change) when the reader's view is empty.

        Raises
        ------
        MisalignedEdgeError
            If t is not an edge of the read domain.
        """
        self._check_edge(self.read_domain, t, READER)
        self._check_order(self._pop_times, t, "pop")
        if not self.can_pop(t):
            return None
        tok = self._queue.popleft()
        self._pop_times.append(t)
        self.notify(FifoEvent(POP, t, len(self._queue)))
        return tok

