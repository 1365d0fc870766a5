# clocks.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Per-PE clock domains with run-time frequency changes.

A :class:`ClockDomain` is a piecewise-periodic edge schedule. Each frequency
change appends a :class:`Segment` whose first edge is an edge of the old
schedule, so edges before a change never move. All arithmetic is on integer
femtoseconds.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import bisect
import logging

from builtins import object, range
from collections import namedtuple

from .core import ConfigError, FrequencyError, Interval, period_of

logger = logging.getLogger(__name__)

## @brief Default synchronizer depth (a standard two-flop synchronizer).
DEFAULT_SYNC_STAGES = 2

## @brief Default number of frequency levels per domain.
DEFAULT_LEVEL_COUNT = 16

## @brief Default f_min as a divisor of f_max.
DEFAULT_FMIN_DIVISOR = 8


class SyncConfig(namedtuple("SyncConfig", "stages")):
    """Synchronizer depth across a clock boundary.

    Parameters
    ----------
    stages : int
        Flip-flop stages in the destination domain. Zero models an ideal
        synchronous boundary.
    """

    __slots__ = ()

    def __new__(cls, stages=DEFAULT_SYNC_STAGES):
        if int(stages) != stages or stages < 0:
            raise ConfigError("Synchronizer stages must be a non-negative integer, "
                              "got %r." % (stages,))
        return super(SyncConfig, cls).__new__(cls, int(stages))


class Segment(namedtuple("Segment",
                         "start_time frequency period first_edge first_index")):
    """One constant-frequency stretch of a clock schedule.

    ``first_index`` is the global edge number of ``first_edge`` so edge
    numbering continues across frequency changes.
    """

    __slots__ = ()

    def edge(self, n):
        return self.first_edge + (n - self.first_index) * self.period


def default_levels(f_min, f_max, count=DEFAULT_LEVEL_COUNT):
    """Evenly spaced integer frequency levels from f_min to f_max inclusive.

    Each level is rounded half up to whole Hz.
    """
    f_min, f_max = int(f_min), int(f_max)
    if count < 1:
        raise ConfigError("Level count must be at least 1, got %r." % (count,))
    if f_min > f_max:
        raise ConfigError("f_min %d exceeds f_max %d." % (f_min, f_max))
    if count == 1:
        return (f_max,)
    steps = count - 1
    span = f_max - f_min
    return tuple(sorted(set(f_min + (2 * i * span + steps) // (2 * steps)
                            for i in range(count))))


class ClockDomain(object):
    """A clock domain whose frequency can change at run time.

    Parameters
    ----------
    domain_id : object
        Identifier of the domain (usually the PE's node id).
    frequency : int
        Initial frequency in Hz. Must be one of the levels.
    levels : sequence of int, optional
        Allowed frequencies in Hz. Defaults to
        :func:`default_levels` (f_min, f_max).
    f_min, f_max : int, optional
        Frequency range. Default to the extremes of ``levels`` or, when no
        levels are given, to ``frequency / 8`` and ``frequency``.
    phase : int, optional
        Time of the first rising edge in femtoseconds.
    """

    def __init__(self, domain_id, frequency, levels=None, f_min=None,
                 f_max=None, phase=0):
        frequency = int(frequency)
        if phase < 0:
            raise ConfigError("Clock phase must be non-negative, got %r." % (phase,))
        if levels is None:
            if f_max is None:
                f_max = frequency
            if f_min is None:
                f_min = f_max // DEFAULT_FMIN_DIVISOR
            levels = default_levels(f_min, f_max)
        levels = tuple(sorted(set(int(f) for f in levels)))
        if not levels:
            raise ConfigError("Clock domain %r has an empty level set." % (domain_id,))
        self.f_min = levels[0] if f_min is None else int(f_min)
        self.f_max = levels[-1] if f_max is None else int(f_max)
        if not self.f_min <= levels[0] or not levels[-1] <= self.f_max:
            raise ConfigError("Levels of domain %r must lie in [%d, %d] Hz."
                              % (domain_id, self.f_min, self.f_max))
        if self.f_min <= 0:
            raise ConfigError("Frequencies must be positive (domain %r)." % (domain_id,))
        self.domain_id = domain_id
        self.levels = levels
        self.phase = int(phase)
        self._check_level(frequency)
        first = Segment(0, frequency, period_of(frequency), self.phase, 0)
        self._segments = [first]
        self._first_edges = [first.first_edge]
        self._first_indices = [first.first_index]
        self.history = [(0, frequency, first.first_edge)]

    def __repr__(self):
        return "<ClockDomain %r %d Hz>" % (self.domain_id, self.frequency)

    def _check_level(self, frequency):
        if frequency not in self.levels:
            raise FrequencyError("Frequency %d Hz is not a level of domain %r "
                                 "(levels %s)." % (frequency, self.domain_id,
                                                   list(self.levels)))

    @property
    def segments(self):
        return list(self._segments)

    @property
    def frequency(self):
        """Frequency of the latest segment (in force from its first edge on)."""
        return self._segments[-1].frequency

    def _segment_for_index(self, n):
        return self._segments[bisect.bisect_right(self._first_indices, n) - 1]

    def _segment_for_time(self, t):
        pos = bisect.bisect_right(self._first_edges, t) - 1
        return self._segments[max(pos, 0)]

    def frequency_at(self, t):
        """Frequency of the segment whose edges cover time t."""
        return self._segment_for_time(t).frequency

    def edge_at(self, n):
        """Time of the n-th rising edge (n counts from 0)."""
        if n < 0:
            raise ValueError("Edge index must be non-negative, got %r." % (n,))
        return self._segment_for_index(n).edge(n)

    def index_of_next_edge(self, t, strict=False):
        """Index of the first edge at or after t (strictly after when strict)."""
        seg = self._segment_for_time(t)
        if t < seg.first_edge:
            return seg.first_index
        offset = t - seg.first_edge
        steps = offset // seg.period
        if not strict and steps * seg.period == offset:
            return seg.first_index + steps
        return seg.first_index + steps + 1

    def next_edge_after(self, t, strict=False):
        """Smallest edge time >= t, or > t when strict."""
        if t < 0:
            raise ValueError("Time must be non-negative, got %r." % (t,))
        return self.edge_at(self.index_of_next_edge(t, strict))

    def is_edge(self, t):
        return t >= 0 and self.next_edge_after(t) == t

    def set_frequency(self, f_new, t_cmd):
        """Switch to f_new at the first old-schedule edge strictly after t_cmd.

        Returns
        -------
        effective : int
            Time of the first edge of the new frequency.

        Raises
        ------
        FrequencyError
            If f_new is not one of the domain's levels.
        ValueError
            If the command would take effect before an already scheduled
            switch.
        """
        f_new = int(f_new)
        self._check_level(f_new)
        index = self.index_of_next_edge(t_cmd, strict=True)
        effective = self.edge_at(index)
        self.history.append((t_cmd, f_new, effective))
        last = self._segments[-1]
        if effective < last.first_edge:
            raise ValueError("Frequency command at %d fs precedes the switch "
                             "scheduled at %d fs." % (t_cmd, last.first_edge))
        if effective == last.first_edge:
            if len(self._segments) == 1:
                # switch lands on the very first edge
                self._segments[0] = Segment(0, f_new, period_of(f_new), effective, 0)
                return effective
            self._segments.pop()
            self._first_edges.pop()
            self._first_indices.pop()
            last = self._segments[-1]
        if f_new == last.frequency:
            return effective
        segment = Segment(t_cmd, f_new, period_of(f_new), effective, index)
        self._segments.append(segment)
        self._first_edges.append(effective)
        self._first_indices.append(index)
        logger.debug("Domain %r switches to %d Hz at %d fs (commanded at %d fs)",
                     self.domain_id, f_new, effective, t_cmd)
        return effective

    def frequency_trace(self, start, end):
        """Partition [start, end) into (Interval, frequency) pieces.

        A segment's frequency holds from its first edge until the next
        segment's first edge; the initial segment also covers the time before
        the first edge.
        """
        trace = []
        bounds = [0] + self._first_edges[1:] + [None]
        for seg, lo, hi in zip(self._segments, bounds, bounds[1:]):
            lo = max(lo, start)
            hi = end if hi is None else min(hi, end)
            if hi > lo:
                trace.append((Interval(lo, hi), seg.frequency))
        return trace


def sync_observe(t_src, dst, cfg):
    """Time at which a value produced at t_src becomes usable in domain dst.

    Parameters
    ----------
    t_src : int
        Time the value changed, in femtoseconds.
    dst : :class:`ClockDomain`
        Observing domain.
    cfg : :class:`SyncConfig` or int
        Synchronizer depth.

    Returns
    -------
    t_obs : int
        ``t_src`` itself for zero stages, otherwise the S-th edge of dst
        strictly after ``t_src``.
    """
    stages = getattr(cfg, "stages", cfg)
    if t_src < 0:
        raise ValueError("Time must be non-negative, got %r." % (t_src,))
    if stages == 0:
        return t_src
    first = dst.index_of_next_edge(t_src, strict=True)
    return dst.edge_at(first + stages - 1)
