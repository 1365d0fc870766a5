# valuetypes.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Typed values for scenario files.

Every scenario key is described by one of the types below. A type knows how
to :meth:`~ValueType.decode` the text on the right of ``key = value`` into a
Python object, how to :meth:`~ValueType.encode` it back, and how to
:meth:`~ValueType.check` that a decoded value is acceptable.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import logging
import numbers
import re

from builtins import object
from collections import OrderedDict

from .compat import ensure_native_str
from .core import (format_frequency, format_time, parse_frequency,
                   parse_time)

logger = logging.getLogger(__name__)


class ValueType(object):
    """Class representing a scenario value type.

    Sub-classes should:

      * Set the :attr:`name` attribute.
      * Implement the :meth:`encode` method.
      * Implement the :meth:`decode` method.

    Parameters
    ----------
    default : object, optional
        The default value for this type.
    optional : boolean, optional
        Whether the value is allowed to be None.
    """

    name = "unknown"

    def __init__(self, default=None, optional=False):
        self._default = default
        self._optional = optional

    def get_default(self):
        """Return the default value.

        Raise a ValueError if the value is not optional
        and there is no default.
        """
        if self._default is None and not self._optional:
            raise ValueError("No value or default given")
        return self._default

    def check(self, value):
        """Check whether the value is valid.

        Do nothing if the value is valid. Raise an exception if the value is
        not valid.
        """
        pass

    def pack(self, value, nocheck=False):
        """Return the value formatted as scenario text.

        Parameters
        ----------
        value : object
            The value to pack.
        nocheck : bool, optional
            Whether to check that the value is valid before packing it.

        Returns
        -------
        packed_value : str
            The text representing the value.
        """
        if value is None:
            value = self.get_default()
        if value is None:
            raise ValueError("Cannot pack a None value.")
        if not nocheck:
            self.check(value)
        return self.encode(value)

    def unpack(self, packed_value):
        """Parse scenario text into an object.

        Parameters
        ----------
        packed_value : str or None
            The text to parse. None selects the default.

        Returns
        -------
        value : object
            The value the text represented.
        """
        if packed_value is None:
            value = self.get_default()
        else:
            value = self.decode(ensure_native_str(packed_value).strip())
        if value is not None:
            self.check(value)
        return value


class Int(ValueType):
    """Integer type.

    Parameters
    ----------
    min : int
        The minimum allowed value. Ignored if not given.
    max : int
        The maximum allowed value. Ignored if not given.
    """

    name = "integer"

    def __init__(self, min=None, max=None, **kwargs):
        super(Int, self).__init__(**kwargs)
        self._min = min
        self._max = max

    def encode(self, value):
        return "%d" % (value,)

    def decode(self, value):
        try:
            return int(value)
        except Exception:
            raise ValueError("Could not parse value '%s' as integer." % value)

    def check(self, value):
        """Check whether the value is between the minimum and maximum.

        Raise a ValueError if it is not.
        """
        if self._min is not None and value < self._min:
            raise ValueError("Integer %d is lower than minimum %d."
                             % (value, self._min))
        if self._max is not None and value > self._max:
            raise ValueError("Integer %d is higher than maximum %d."
                             % (value, self._max))


class Float(ValueType):
    """Floating point type with optional bounds."""

    name = "float"

    def __init__(self, min=None, max=None, **kwargs):
        super(Float, self).__init__(**kwargs)
        self._min = min
        self._max = max

    def encode(self, value):
        if isinstance(value, numbers.Real):
            return "%r" % (float(value),)
        raise ValueError("Could not encode value '%r' as float." % (value,))

    def decode(self, value):
        try:
            return float(value)
        except Exception:
            raise ValueError("Could not parse value '%s' as float." % value)

    def check(self, value):
        if self._min is not None and value < self._min:
            raise ValueError("Float %g is lower than minimum %g."
                             % (value, self._min))
        if self._max is not None and value > self._max:
            raise ValueError("Float %g is higher than maximum %g."
                             % (value, self._max))


class Bool(ValueType):
    """Boolean written as yes/no (true/false and 1/0 are also accepted)."""

    name = "boolean"

    TRUE_WORDS = ("yes", "true", "on", "1")
    FALSE_WORDS = ("no", "false", "off", "0")

    def encode(self, value):
        return "yes" if value else "no"

    def decode(self, value):
        lowered = value.lower()
        if lowered in self.TRUE_WORDS:
            return True
        if lowered in self.FALSE_WORDS:
            return False
        raise ValueError("Boolean value must be yes or no but is '%s'." % (value,))


class Str(ValueType):
    """Plain text."""

    name = "string"

    def encode(self, value):
        return ensure_native_str(value)

    def decode(self, value):
        return value


class Discrete(Str):
    """One of a fixed set of words.

    Parameters
    ----------
    values : iterable of str
        List of the values the discrete type may accept.
    """

    name = "discrete"

    def __init__(self, values, **kwargs):
        super(Discrete, self).__init__(**kwargs)
        self._values = list(values)  # just to preserve ordering
        self._valid_values = set(self._values)

    @property
    def values(self):
        return list(self._values)

    def check(self, value):
        """Check whether the value in the set of allowed values.

        Raise a ValueError if it is not.
        """
        if value not in self._valid_values:
            raise ValueError("Discrete value '%s' is not one of %s."
                             % (value, list(self._values)))


class Time(Int):
    """Simulated time with a unit suffix, stored as integer femtoseconds."""

    name = "time"

    def encode(self, value):
        return format_time(value)

    def decode(self, value):
        return parse_time(value)


class Frequency(Int):
    """Frequency with a unit suffix, stored as integer Hz."""

    name = "frequency"

    def encode(self, value):
        return format_frequency(value)

    def decode(self, value):
        return parse_frequency(value)


class Auto(ValueType):
    """Either the word ``auto`` or a value of the wrapped type.

    Decodes ``auto`` to the string ``"auto"``.
    """

    name = "auto"
    AUTO = "auto"

    def __init__(self, inner, **kwargs):
        super(Auto, self).__init__(**kwargs)
        self._inner = inner
        self.name = "auto|%s" % inner.name

    def encode(self, value):
        if value == self.AUTO:
            return self.AUTO
        return self._inner.encode(value)

    def decode(self, value):
        if value.lower() == self.AUTO:
            return self.AUTO
        return self._inner.decode(value)

    def check(self, value):
        if value != self.AUTO:
            self._inner.check(value)


class ListOf(ValueType):
    """Comma separated list of values of one type, decoded to a tuple."""

    name = "list"

    def __init__(self, inner, min_length=0, **kwargs):
        super(ListOf, self).__init__(**kwargs)
        self._inner = inner
        self._min_length = min_length
        self.name = "list of %s" % inner.name

    def encode(self, value):
        return ", ".join(self._inner.encode(v) for v in value)

    def decode(self, value):
        if not value:
            return ()
        return tuple(self._inner.decode(part.strip()) for part in value.split(","))

    def check(self, value):
        if len(value) < self._min_length:
            raise ValueError("Expected at least %d values but got %d."
                             % (self._min_length, len(value)))
        for item in value:
            self._inner.check(item)


class Levels(ValueType):
    """Frequency level grid: either a level count or an explicit frequency list."""

    name = "levels"

    def __init__(self, **kwargs):
        super(Levels, self).__init__(**kwargs)
        self._count = Int(min=1)
        self._list = ListOf(Frequency(min=1), min_length=1)

    def encode(self, value):
        if isinstance(value, tuple):
            return self._list.encode(value)
        return self._count.encode(value)

    def decode(self, value):
        if "," in value or value.rstrip().endswith("Hz"):
            return self._list.decode(value)
        return self._count.decode(value)

    def check(self, value):
        if isinstance(value, tuple):
            self._list.check(value)
        else:
            self._count.check(value)


class Cycles(ValueType):
    """Compute cycles per firing: ``64`` or a uniform range ``40..80``."""

    name = "cycles"

    def encode(self, value):
        if isinstance(value, tuple):
            return "%d..%d" % value
        return "%d" % value

    def decode(self, value):
        try:
            if ".." in value:
                lo, hi = value.split("..")
                return (int(lo), int(hi))
            return int(value)
        except ValueError:
            raise ValueError("Could not parse '%s' as compute cycles." % value)

    def check(self, value):
        if isinstance(value, tuple):
            lo, hi = value
            if lo < 1 or hi < lo:
                raise ValueError("Cycle range %d..%d must satisfy 1 <= min <= max."
                                 % (lo, hi))
        elif value < 1:
            raise ValueError("Compute cycles must be at least 1, got %d." % value)


class Coordinate(ValueType):
    """Mesh coordinate written ``x,y``."""

    name = "coordinate"

    def encode(self, value):
        return "%d,%d" % tuple(value)

    def decode(self, value):
        try:
            x, y = value.split(",")
            return (int(x), int(y))
        except ValueError:
            raise ValueError("Could not parse '%s' as a coordinate x,y." % value)

    def check(self, value):
        if value[0] < 0 or value[1] < 0:
            raise ValueError("Coordinate %r must be non-negative." % (value,))


class MeshDims(ValueType):
    """Mesh dimensions written ``WxH``."""

    name = "mesh"

    def encode(self, value):
        return "%dx%d" % tuple(value)

    def decode(self, value):
        try:
            w, h = value.lower().split("x")
            return (int(w), int(h))
        except ValueError:
            raise ValueError("Could not parse '%s' as mesh dimensions WxH." % value)

    def check(self, value):
        if value[0] < 1 or value[1] < 1:
            raise ValueError("Mesh dimensions %r must be positive." % (value,))


class ParamList(ValueType):
    """Generator parameters ``name=value, ...`` decoded to a sorted tuple of pairs.

    Integer-looking values become ints; anything else stays text.
    """

    name = "params"

    ITEM_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)\s*$")

    def encode(self, value):
        return ", ".join("%s=%s" % (k, v) for k, v in value)

    def decode(self, value):
        if not value.strip():
            return ()
        items = {}
        for part in value.split(","):
            match = self.ITEM_RE.match(part)
            if match is None:
                raise ValueError("Could not parse '%s' as name=value." % part.strip())
            key, text = match.groups()
            try:
                items[key] = int(text)
            except ValueError:
                items[key] = text
        return tuple(sorted(items.items()))


class PortRates(ValueType):
    """Port rates ``port:k,port:k`` decoded to an ordered mapping."""

    name = "ports"

    def encode(self, value):
        return ",".join("%s:%d" % item for item in value.items())

    def decode(self, value):
        rates = OrderedDict()
        for part in value.split(","):
            try:
                port, k = part.split(":")
                rates[port.strip()] = int(k)
            except ValueError:
                raise ValueError("Could not parse '%s' as port:rate." % part)
        return rates

    def check(self, value):
        for port, k in value.items():
            if k < 1:
                raise ValueError("Rate of port %s must be at least 1, got %d."
                                 % (port, k))


class Fields(ValueType):
    """Whitespace separated ``field=value`` list with a typed field table.

    Parameters
    ----------
    fields : list of (str, ValueType) pairs
        Allowed field names in encoding order.
    required : iterable of str
        Fields that must be present.
    """

    name = "fields"

    def __init__(self, fields, required=(), **kwargs):
        super(Fields, self).__init__(**kwargs)
        self._fields = OrderedDict(fields)
        self._required = tuple(required)

    def encode(self, value):
        parts = []
        for key, vtype in self._fields.items():
            if value.get(key) is not None:
                parts.append("%s=%s" % (key, vtype.encode(value[key])))
        return " ".join(parts)

    def decode(self, value):
        result = {}
        for part in value.split():
            if "=" not in part:
                raise ValueError("Expected field=value but got '%s'." % part)
            key, text = part.split("=", 1)
            if key not in self._fields:
                raise ValueError("Unknown field '%s' (expected one of %s)."
                                 % (key, list(self._fields)))
            if key in result:
                raise ValueError("Field '%s' given twice." % key)
            result[key] = self._fields[key].decode(text)
        for key in self._required:
            if key not in result:
                raise ValueError("Missing required field '%s'." % key)
        return result

    def check(self, value):
        for key, item in value.items():
            self._fields[key].check(item)


class Endpoints(ValueType):
    """Channel spec ``src.port -> dst.port [capacity=n] [initial=n]``."""

    name = "channel"

    CHANNEL_RE = re.compile(
        r"^(?P<src>[^\s.]+)\.(?P<src_port>\S+)\s*->\s*"
        r"(?P<dst>[^\s.]+)\.(?P<dst_port>\S+)(?P<rest>(\s+\S+)*)\s*$")

    def __init__(self, **kwargs):
        super(Endpoints, self).__init__(**kwargs)
        self._options = Fields([("capacity", Int(min=1)), ("initial", Int(min=0))])

    def encode(self, value):
        text = "%s.%s -> %s.%s" % (value["src"], value["src_port"],
                                   value["dst"], value["dst_port"])
        options = self._options.encode(value)
        return text + (" " + options if options else "")

    def decode(self, value):
        match = self.CHANNEL_RE.match(value)
        if match is None:
            raise ValueError("Could not parse '%s' as src.port -> dst.port." % value)
        result = dict((key, match.group(key))
                      for key in ("src", "src_port", "dst", "dst_port"))
        result.update(self._options.decode(match.group("rest").strip()))
        return result

    def check(self, value):
        self._options.check(dict((k, v) for k, v in value.items()
                                 if k in ("capacity", "initial")))


NODE_FIELDS = Fields(
    [("cycles", Cycles()), ("at", Coordinate()), ("seed", Int(min=0)),
     ("in", PortRates()), ("out", PortRates())],
    required=("cycles",))

DISTURBANCE_FIELDS = Fields([("at", Time(min=0)), ("cycles", Cycles())],
                            required=("at", "cycles"))
