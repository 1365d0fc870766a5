# compat.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Text coercion for scenario input, which may arrive as bytes or text."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import builtins

from future.utils import native_str


def is_bytes(value):
    """Indicate if object is bytes-like.

    future.utils.isbytes is deprecated, so re-implementing, as per their
    recommendation.
    """
    return isinstance(value, builtins.bytes)


def ensure_native_str(value):
    """Coerce text or UTF-8 bytes to the native string type."""
    if is_bytes(value):
        value = value.decode('utf-8')
    if isinstance(value, (native_str, builtins.str)):
        return native_str(value)
    raise TypeError("Invalid type for string conversion: {}".format(type(value)))


def as_lines(text):
    """Split scenario text into native-string lines, dropping any BOM."""
    text = ensure_native_str(text)
    if text.startswith(u"\ufeff"):
        text = text[1:]
    return text.splitlines()
