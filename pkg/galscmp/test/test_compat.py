# test_compat.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Tests for the compat module."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import unittest

from galscmp.compat import as_lines, ensure_native_str, is_bytes


class TestCompat(unittest.TestCase):

    def test_ensure_native_str(self):
        self.assertEqual(ensure_native_str(b"abc"), "abc")
        self.assertEqual(ensure_native_str(u"abc"), "abc")
        self.assertEqual(ensure_native_str(u"µs".encode("utf-8")), u"µs")
        self.assertRaises(TypeError, ensure_native_str, 5)
        self.assertRaises(TypeError, ensure_native_str, None)

    def test_is_bytes(self):
        self.assertTrue(is_bytes(b"x"))
        self.assertFalse(is_bytes(u"x"))

    def test_as_lines(self):
        self.assertEqual(as_lines(b"a\r\nb\n"), ["a", "b"])
        self.assertEqual(as_lines(u"\ufeff[sim]\nseed = 1"), ["[sim]", "seed = 1"])
        self.assertEqual(as_lines(""), [])
