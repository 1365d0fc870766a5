# core.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Core time units, exceptions and small value helpers for the simulator."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import logging

from collections import namedtuple
from fractions import Fraction

from .compat import ensure_native_str

logger = logging.getLogger(__name__)

## @brief Femtoseconds per second; all simulated time is an integer count of fs.
FS_PER_SECOND = 10 ** 15

## @brief Multipliers from time unit suffix to femtoseconds.
TIME_UNITS = {
    "s": FS_PER_SECOND,
    "ms": 10 ** 12,
    "us": 10 ** 9,
    "ns": 10 ** 6,
    "ps": 10 ** 3,
    "fs": 1,
}

## @brief Multipliers from frequency unit suffix to Hz.
FREQUENCY_UNITS = {
    "Hz": 1,
    "kHz": 10 ** 3,
    "MHz": 10 ** 6,
    "GHz": 10 ** 9,
}


class GalsError(Exception):
    """Base class for all simulator errors."""


class ConfigError(GalsError, ValueError):
    """Raised for invalid configuration values."""


class FrequencyError(ConfigError):
    """Raised when a clock is asked to run at a frequency it does not offer."""


class MisalignedEdgeError(GalsError, ValueError):
    """Raised when a FIFO side is accessed at a time that is not one of its edges."""


class ValidationError(GalsError, ValueError):
    """Raised when a graph, mapping or scenario fails validation.

    Parameters
    ----------
    errors : list of str
        Every violation found, in the order the checks ran.
    """

    def __init__(self, errors, prefix="validation failed"):
        self.errors = list(errors)
        self.prefix = prefix
        msg = "%s: %s" % (prefix, "; ".join(self.errors))
        super(ValidationError, self).__init__(msg)

    def __reduce__(self):
        return self.__class__, (self.errors, self.prefix)


class EnumerationOverflowError(GalsError, RuntimeError):
    """Raised when cycle enumeration exceeds the configured bound."""


class GenerationError(ConfigError):
    """Raised for invalid workload generator parameters."""


class UnsupportedAnalysisError(GalsError, ValueError):
    """Raised when the analytic throughput oracle cannot handle a graph."""


class PenaltyError(GalsError, ZeroDivisionError):
    """Raised when a penalty is requested against a zero-throughput baseline."""


class TraceError(GalsError, ValueError):
    """Raised for frequency traces that do not partition their window."""


class ScenarioSyntaxError(ConfigError):
    """Raised for malformed scenario text.

    Parameters
    ----------
    msg : str
        Description of the problem.
    lineno : int or None
        One-based line number of the offending line.
    """

    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        self._msg = msg
        if lineno is not None:
            msg = "line %d: %s" % (lineno, msg)
        super(ScenarioSyntaxError, self).__init__(msg)

    def __reduce__(self):
        return self.__class__, (self._msg, self.lineno)


class SweepError(GalsError, RuntimeError):
    """Raised when a sweep point fails; carries the axis value."""

    def __init__(self, axis, value, error):
        self.axis = axis
        self.value = value
        self.error = error
        super(SweepError, self).__init__(
            "sweep point %s=%s failed: %s" % (axis, value, error))

    def __reduce__(self):
        return self.__class__, (self.axis, self.value, self.error)


class Interval(namedtuple("Interval", "start end")):
    """Half-open span of simulated time [start, end) in femtoseconds."""

    __slots__ = ()

    @property
    def duration(self):
        return self.end - self.start


def period_of(frequency):
    """Clock period in femtoseconds for an integer frequency in Hz.

    Rounds half up so that e.g. 3 GHz maps to 333333 fs.
    """
    frequency = int(frequency)
    if frequency <= 0:
        raise FrequencyError("Frequency must be positive, got %r." % (frequency,))
    return (2 * FS_PER_SECOND + frequency) // (2 * frequency)


def fs_to_seconds(value):
    return value / FS_PER_SECOND


def rate(tokens, duration):
    """Tokens per second for a count over a duration given in femtoseconds."""
    if duration <= 0:
        return 0.0
    return tokens * FS_PER_SECOND / duration


def _split_number(text, units, kind):
    text = ensure_native_str(text).strip()
    # longest suffix first so "ms" is not read as "s"
    for suffix in sorted(units, key=len, reverse=True):
        if text.endswith(suffix):
            number = text[:-len(suffix)].strip()
            return number, units[suffix]
    raise ValueError("Could not parse %r as a %s: missing unit suffix (one of %s)."
                     % (text, kind, ", ".join(sorted(units))))


def parse_time(text):
    """Parse a time such as ``"50us"`` or ``"1.5 ns"`` into integer femtoseconds.

    Raises
    ------
    ValueError
        If the text has no known unit or does not resolve to a whole number
        of femtoseconds.
    """
    number, scale = _split_number(text, TIME_UNITS, "time")
    try:
        value = Fraction(number) * scale
    except (ValueError, ZeroDivisionError):
        raise ValueError("Could not parse %r as a time." % (text,))
    if value.denominator != 1:
        raise ValueError("Time %r is not a whole number of femtoseconds." % (text,))
    return int(value)


def parse_frequency(text):
    """Parse a frequency such as ``"100MHz"`` into integer Hz."""
    number, scale = _split_number(text, FREQUENCY_UNITS, "frequency")
    try:
        value = Fraction(number) * scale
    except (ValueError, ZeroDivisionError):
        raise ValueError("Could not parse %r as a frequency." % (text,))
    if value.denominator != 1:
        raise ValueError("Frequency %r is not a whole number of Hz." % (text,))
    return int(value)


def format_time(value):
    """Format integer femtoseconds with the largest unit that divides exactly."""
    value = int(value)
    if value == 0:
        return "0fs"
    for suffix in ("s", "ms", "us", "ns", "ps"):
        if value % TIME_UNITS[suffix] == 0:
            return "%d%s" % (value // TIME_UNITS[suffix], suffix)
    return "%dfs" % value


def format_frequency(value):
    """Format integer Hz with the largest unit that divides exactly."""
    value = int(value)
    for suffix in ("GHz", "MHz", "kHz"):
        if value and value % FREQUENCY_UNITS[suffix] == 0:
            return "%d%s" % (value // FREQUENCY_UNITS[suffix], suffix)
    return "%dHz" % value
