# dfs.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Per-PE frequency governors and the voltage/frequency power model."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import bisect
import logging

from builtins import object
from collections import OrderedDict, namedtuple

from .compat import ensure_native_str
from .core import (FS_PER_SECOND, ConfigError, FrequencyError, TraceError,
                   rate)

logger = logging.getLogger(__name__)

## @brief Default governor decision window (50 us) in femtoseconds.
DEFAULT_WINDOW = 50 * 10 ** 9

DEFAULT_KP, DEFAULT_KI, DEFAULT_KD = 0.1, 1.2, 0.0

DEFAULT_UP_THRESHOLD, DEFAULT_DOWN_THRESHOLD = 0.8, 0.3

## @brief Busy fraction below which a PE counts as stall-limited (None: off).
DEFAULT_BUSY_FLOOR = None

## @brief Feed-forward operating point as a fraction of setpoint x cycles.
NOMINAL_FRACTION = 0.8

AUTO = "auto"


class WindowSample(namedtuple("WindowSample",
                              "start end tokens_completed busy_cycles total_cycles")):
    """What one PE did during one governor window."""

    __slots__ = ()

    @property
    def duration(self):
        return self.end - self.start

    @property
    def throughput(self):
        """Completed firings per second."""
        return rate(self.tokens_completed, self.duration)

    @property
    def busy_fraction(self):
        if self.total_cycles <= 0:
            return 0.0
        return self.busy_cycles / self.total_cycles


class PowerModel(namedtuple("PowerModel", "switched_capacitance v_min v_max "
                                          "f_min f_max leakage")):
    """Linear V(f) map with dynamic ``aC V^2 f`` and leakage ``k V`` power.

    Parameters
    ----------
    switched_capacitance : float
        Normalised aC.
    v_min, v_max : float
        Supply voltage at f_min and f_max.
    f_min, f_max : int
        Frequency range in Hz.
    leakage : float, optional
        Normalised leakage coefficient (W/V).
    """

    __slots__ = ()

    def __new__(cls, switched_capacitance, v_min, v_max, f_min, f_max, leakage=0.0):
        if not (switched_capacitance > 0 and v_min > 0 and v_max > 0
                and f_min > 0 and f_max > 0):
            raise ConfigError("Power model parameters must be positive.")
        if v_min > v_max:
            raise ConfigError("v_min %g exceeds v_max %g." % (v_min, v_max))
        if f_min > f_max:
            raise ConfigError("f_min %d exceeds f_max %d." % (f_min, f_max))
        if leakage < 0:
            raise ConfigError("Leakage must be non-negative, got %g." % (leakage,))
        return super(PowerModel, cls).__new__(cls, switched_capacitance, v_min,
                                              v_max, f_min, f_max, leakage)


def voltage_of(f, model):
    """Supply voltage for frequency f on the linear V(f) map."""
    if not model.f_min <= f <= model.f_max:
        raise FrequencyError("Frequency %d Hz outside [%d, %d] Hz."
                             % (f, model.f_min, model.f_max))
    if model.f_max == model.f_min:
        return model.v_max
    return (model.v_min + (model.v_max - model.v_min)
            * (f - model.f_min) / (model.f_max - model.f_min))


def power_of(f, model):
    v = voltage_of(f, model)
    return model.switched_capacitance * v * v * f + model.leakage * v


def trace_energy(trace, model, window=None):
    """Energy of one PE's frequency trace.

    Parameters
    ----------
    trace : list of (Interval, int)
        Consecutive (interval, frequency) pieces in femtoseconds and Hz.
    model : :class:`PowerModel`
    window : Interval, optional
        When given, the trace must cover it exactly.
    """
    total = 0.0
    previous = None
    for span, f in trace:
        start, end = span
        if end < start:
            raise TraceError("Interval %r ends before it starts." % (span,))
        if previous is not None and start != previous:
            kind = "overlap" if start < previous else "gap"
            raise TraceError("Trace intervals %s at %d fs." % (kind, start))
        previous = end
        total += power_of(f, model) * (end - start) / FS_PER_SECOND
    if window is not None and trace:
        if trace[0][0][0] != window[0] or previous != window[1]:
            raise TraceError("Trace does not partition the window %r." % (window,))
    return total


def energy(freq_trace, model, window=None):
    """Per-PE and total energy of a set of frequency traces.

    Parameters
    ----------
    freq_trace : dict
        PE id to a list of (Interval, frequency) pieces.
    model : :class:`PowerModel` or dict
        One model for every PE, or a PE id to model mapping.

    Returns
    -------
    (per_pe, total) : (OrderedDict, float)
    """
    per_pe = OrderedDict()
    for pe, trace in freq_trace.items():
        pe_model = model[pe] if isinstance(model, dict) else model
        per_pe[pe] = trace_energy(trace, pe_model, window)
    return per_pe, sum(per_pe.values())


def snap_to_level(raw, levels):
    """Nearest level to raw; exact ties go to the lower level."""
    if not levels:
        raise ConfigError("Empty frequency level set.")
    pos = bisect.bisect_left(levels, raw)
    if pos == 0:
        return levels[0]
    if pos == len(levels):
        return levels[-1]
    lo, hi = levels[pos - 1], levels[pos]
    # a hair of tolerance so float noise at the midpoint picks the lower level
    if hi - raw < raw - lo - 1e-6 * raw:
        return hi
    return lo


def _level_index(current, levels):
    if current in levels:
        return levels.index(current)
    return levels.index(snap_to_level(current, levels))


class PidController(object):
    """Positional PID on normalised throughput error with anti-windup.

    Parameters
    ----------
    setpoint : float
        Desired firings per second.
    f_nominal : int
        Feed-forward frequency; the output is ``f_nominal * (1 + u)``.
    f_min, f_max : int
        Output range.
    kp, ki, kd : float, optional
        Gains on the normalised error.
    window : int, optional
        Window length in femtoseconds.
    busy_floor : float or None, optional
        Positive error is not integrated while the PE's busy fraction is
        below this value. None (the default) integrates every window and
        leaves windup to the saturation check alone.
    """

    def __init__(self, setpoint, f_nominal, f_min, f_max, kp=DEFAULT_KP,
                 ki=DEFAULT_KI, kd=DEFAULT_KD, window=DEFAULT_WINDOW,
                 busy_floor=DEFAULT_BUSY_FLOOR):
        if window <= 0:
            raise ConfigError("PID window must be positive, got %r." % (window,))
        if setpoint <= 0:
            raise ConfigError("PID setpoint must be positive, got %r." % (setpoint,))
        if f_nominal <= 0 or f_min > f_max:
            raise ConfigError("PID frequency range is invalid.")
        self.kp, self.ki, self.kd = kp, ki, kd
        self.setpoint = setpoint
        self.f_nominal = f_nominal
        self.f_min, self.f_max = f_min, f_max
        self.window = window
        self.busy_floor = busy_floor
        self.integral = 0.0
        self.prev_error = 0.0
        self.last_output = None

    def integral_limits(self):
        """Integral range keeping ``f_nominal (1 + ki I)`` within [f_min, f_max]."""
        if self.ki == 0:
            return 0.0, 0.0
        lo = (self.f_min / self.f_nominal - 1) / self.ki
        hi = (self.f_max / self.f_nominal - 1) / self.ki
        return min(lo, hi), max(lo, hi)

    def step(self, sample, levels, current=None):
        """One control decision for the window just measured.

        Parameters
        ----------
        sample : :class:`WindowSample`
        levels : sequence of int
            Allowed output frequencies, ascending.
        current : int, optional
            Frequency during the window; defaults to the previous output.

        Returns
        -------
        frequency : int
            Nearest level to the controller output.
        """
        if not levels:
            raise ConfigError("Empty frequency level set.")
        if sample.duration != self.window:
            raise ValueError("Sample spans %d fs but the window is %d fs."
                             % (sample.duration, self.window))
        if current is None:
            current = self.last_output
        e = (self.setpoint - sample.throughput) / self.setpoint
        saturated = current is not None and (
            (current >= self.f_max and e > 0) or (current <= self.f_min and e < 0))
        starved = (e > 0 and self.busy_floor is not None
                   and sample.busy_fraction < self.busy_floor)
        if not (saturated or starved):
            lo, hi = self.integral_limits()
            self.integral = min(max(self.integral + e, lo), hi)
        u = self.kp * e + self.ki * self.integral + self.kd * (e - self.prev_error)
        raw = self.f_nominal * (1 + u)
        raw = min(max(raw, self.f_min), self.f_max)
        self.prev_error = e
        self.last_output = snap_to_level(raw, levels)
        logger.debug("PID e=%.4f I=%.4f raw=%.0f Hz -> %d Hz",
                     e, self.integral, raw, self.last_output)
        return self.last_output


def pid_step(ctrl, sample, levels):
    """Advance a :class:`PidController` by one window and return its frequency."""
    return ctrl.step(sample, levels)


class Governor(object):
    """Base class for per-PE frequency policies.

    Parameters
    ----------
    up_threshold, down_threshold : float, optional
        Busy fractions in (0, 1) with up > down.
    """

    # Governor kind constants
    STATIC, PID, ONDEMAND, CONSERVATIVE = range(4)

    ## @brief Mapping from governor constant to governor name.
    GOVERNOR_LOOKUP = {
        STATIC: "static",
        PID: "pid",
        ONDEMAND: "ondemand",
        CONSERVATIVE: "conservative",
    }

    ## @brief Mapping from governor name to governor constant.
    GOVERNOR_LOOKUP_REV = dict((v, k) for k, v in GOVERNOR_LOOKUP.items())

    kind = None

    def __init__(self, up_threshold=DEFAULT_UP_THRESHOLD,
                 down_threshold=DEFAULT_DOWN_THRESHOLD, **kwargs):
        if not (0 < down_threshold < up_threshold < 1):
            raise ConfigError("Governor thresholds must satisfy 0 < down < up < 1, "
                              "got down=%r up=%r." % (down_threshold, up_threshold))
        self.up_threshold = up_threshold
        self.down_threshold = down_threshold

    @classmethod
    def get_governor(cls, name, **kwargs):
        """Factory method to create a governor object.

        Parameters
        ----------
        name : str or bytes
            Name of the governor kind.
        kwargs : dict
            Parameters for the chosen kind.

        Returns
        -------
        governor : :class:`Governor` object
            The created governor.
        """
        name = ensure_native_str(name)
        if name not in cls.GOVERNOR_LOOKUP_REV:
            raise ConfigError("Unknown governor '%s'. Known governors are %s."
                              % (name, list(cls.GOVERNOR_LOOKUP.values())))
        kind = cls.GOVERNOR_LOOKUP_REV[name]
        if kind == cls.STATIC:
            return StaticGovernor(**kwargs)
        elif kind == cls.PID:
            return PidGovernor(**kwargs)
        elif kind == cls.ONDEMAND:
            return OndemandGovernor(**kwargs)
        elif kind == cls.CONSERVATIVE:
            return ConservativeGovernor(**kwargs)

    @property
    def name(self):
        return self.GOVERNOR_LOOKUP[self.kind]

    @property
    def is_static(self):
        return self.kind == self.STATIC

    def step(self, sample, current, levels):
        """Frequency for the next window.

        Sub-classes should implement this method.
        """
        raise NotImplementedError


class StaticGovernor(Governor):
    """Never changes frequency."""

    kind = Governor.STATIC

    def step(self, sample, current, levels):
        return current


class OndemandGovernor(Governor):
    """Jumps to f_max under load and steps down one level when idle."""

    kind = Governor.ONDEMAND

    def step(self, sample, current, levels):
        if not levels:
            raise ConfigError("Empty frequency level set.")
        busy = sample.busy_fraction
        if busy > self.up_threshold:
            return levels[-1]
        if busy < self.down_threshold:
            return levels[max(_level_index(current, levels) - 1, 0)]
        return current


class ConservativeGovernor(Governor):
    """Moves one level at a time in the direction of the load."""

    kind = Governor.CONSERVATIVE

    def step(self, sample, current, levels):
        if not levels:
            raise ConfigError("Empty frequency level set.")
        busy = sample.busy_fraction
        k = _level_index(current, levels)
        if busy > self.up_threshold:
            return levels[min(k + 1, len(levels) - 1)]
        if busy < self.down_threshold:
            return levels[max(k - 1, 0)]
        return current


class PidGovernor(Governor):
    """Throughput-tracking governor driven by a :class:`PidController`.

    Accepts the :class:`PidController` parameters as keyword arguments.
    ``f_nominal`` may be ``"auto"``, meaning a fixed fraction of
    ``setpoint * cycles`` clamped to [f_min, f_max]; ``cycles`` is then the
    expected compute cycles per firing of the governed node.
    """

    kind = Governor.PID

    def __init__(self, setpoint, f_min, f_max, f_nominal=AUTO, cycles=None,
                 kp=DEFAULT_KP, ki=DEFAULT_KI, kd=DEFAULT_KD, window=DEFAULT_WINDOW,
                 busy_floor=DEFAULT_BUSY_FLOOR, **kwargs):
        super(PidGovernor, self).__init__(**kwargs)
        if f_nominal == AUTO:
            if cycles is None:
                raise ConfigError("Automatic f_nominal needs the node's cycle count.")
            f_nominal = min(max(NOMINAL_FRACTION * setpoint * cycles, f_min), f_max)
        self.controller = PidController(setpoint, f_nominal, f_min, f_max, kp=kp,
                                        ki=ki, kd=kd, window=window,
                                        busy_floor=busy_floor)

    def step(self, sample, current, levels):
        return self.controller.step(sample, levels, current)


def governor_step(gov, sample, current, levels):
    """Frequency chosen by a governor for the next window."""
    return gov.step(sample, current, levels)


def optimal_static_frequencies(graph, target_rate):
    """Lowest continuous frequency per node that sustains target_rate.

    ``f_i = target_rate * expected_cycles_i``; a lower bound on what any
    governor can achieve for a homogeneous pipeline.
    """
    return OrderedDict((node.id, target_rate * node.expected_cycles)
                       for node in graph.nodes.values())
