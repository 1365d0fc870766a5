# test_dfs.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Tests for the dfs module."""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import unittest

from builtins import range, zip

from galscmp.core import (FS_PER_SECOND, ConfigError, FrequencyError, Interval,
                          TraceError)
from galscmp.dfs import (ConservativeGovernor, Governor, OndemandGovernor,
                         PidController, PidGovernor, PowerModel, StaticGovernor,
                         WindowSample, energy, governor_step,
                         optimal_static_frequencies, pid_step, power_of,
                         snap_to_level, trace_energy, voltage_of)
from galscmp.testutils import chain_scenario

MHZ = 10 ** 6
WINDOW = 10 ** 10
LEVELS = [f * MHZ for f in range(50, 201, 25)]


def _sample(tokens, busy=10, total=10, window=WINDOW):
    return WindowSample(0, window, tokens, busy, total)


class TestPowerModel(unittest.TestCase):

    def setUp(self):
        self.model = PowerModel(1.0, 1.0, 2.0, 100, 200)

    def test_bad_parameters(self):
        self.assertRaises(ConfigError, PowerModel, 0.0, 1.0, 2.0, 100, 200)
        self.assertRaises(ConfigError, PowerModel, 1.0, 2.0, 1.0, 100, 200)
        self.assertRaises(ConfigError, PowerModel, 1.0, 1.0, 2.0, 300, 200)
        self.assertRaises(ConfigError, PowerModel, 1.0, 1.0, 2.0, 100, 200, -1.0)

    def test_voltage(self):
        self.assertEqual(voltage_of(100, self.model), 1.0)
        self.assertEqual(voltage_of(150, self.model), 1.5)
        self.assertEqual(voltage_of(200, self.model), 2.0)
        self.assertRaises(FrequencyError, voltage_of, 99, self.model)
        self.assertRaises(FrequencyError, voltage_of, 201, self.model)
        flat = PowerModel(1.0, 1.0, 2.0, 100, 100)
        self.assertEqual(voltage_of(100, flat), 2.0)

    def test_power(self):
        self.assertEqual(power_of(100, self.model), 100.0)
        self.assertEqual(power_of(200, self.model), 800.0)
        leaky = self.model._replace(leakage=3.0)
        self.assertEqual(power_of(100, leaky), 103.0)

    def test_trace_energy(self):
        half = FS_PER_SECOND // 2
        trace = [(Interval(0, half), 100), (Interval(half, FS_PER_SECOND), 200)]
        self.assertEqual(trace_energy(trace, self.model), 450.0)
        self.assertEqual(trace_energy(trace, self.model, Interval(0, FS_PER_SECOND)),
                         450.0)
        self.assertEqual(trace_energy([], self.model), 0.0)

    def test_bad_traces(self):
        gap = [(Interval(0, 10), 100), (Interval(11, 20), 100)]
        overlap = [(Interval(0, 10), 100), (Interval(9, 20), 100)]
        backwards = [(Interval(10, 0), 100)]
        for trace in (gap, overlap, backwards):
            self.assertRaises(TraceError, trace_energy, trace, self.model)
        self.assertRaises(TraceError, trace_energy, [(Interval(0, 10), 100)],
                          self.model, Interval(0, 20))
        self.assertRaises(FrequencyError, trace_energy, [(Interval(0, 10), 50)],
                          self.model)

    def test_energy_per_pe(self):
        other = PowerModel(2.0, 1.0, 2.0, 100, 200)
        traces = {"a": [(Interval(0, FS_PER_SECOND), 100)],
                  "b": [(Interval(0, FS_PER_SECOND), 100)]}
        per_pe, total = energy(traces, self.model)
        self.assertEqual(dict(per_pe), {"a": 100.0, "b": 100.0})
        self.assertEqual(total, 200.0)
        per_pe, total = energy(traces, {"a": self.model, "b": other})
        self.assertEqual(per_pe["b"], 200.0)
        self.assertEqual(total, 300.0)


class TestLevels(unittest.TestCase):

    def test_snap(self):
        levels = [10, 20, 30]
        self.assertEqual(snap_to_level(5, levels), 10)
        self.assertEqual(snap_to_level(14, levels), 10)
        self.assertEqual(snap_to_level(15, levels), 10)
        self.assertEqual(snap_to_level(16, levels), 20)
        self.assertEqual(snap_to_level(20, levels), 20)
        self.assertEqual(snap_to_level(99, levels), 30)
        self.assertRaises(ConfigError, snap_to_level, 5, [])

    def test_window_sample(self):
        sample = WindowSample(0, WINDOW, 10, 3, 4)
        self.assertEqual(sample.duration, WINDOW)
        self.assertEqual(sample.throughput, 10 ** 6)
        self.assertEqual(sample.busy_fraction, 0.75)
        self.assertEqual(WindowSample(0, 0, 0, 0, 0).busy_fraction, 0.0)
        self.assertEqual(WindowSample(0, 0, 5, 0, 0).throughput, 0.0)


class TestPidController(unittest.TestCase):

    def _controller(self, **kwargs):
        params = dict(kp=0.5, ki=0.2, window=WINDOW)
        params.update(kwargs)
        return PidController(10 ** 6, 100 * MHZ, 50 * MHZ, 200 * MHZ, **params)

    def test_bad_parameters(self):
        self.assertRaises(ConfigError, PidController, 0, MHZ, MHZ, MHZ)
        self.assertRaises(ConfigError, PidController, 1, MHZ, 2 * MHZ, MHZ)
        self.assertRaises(ConfigError, PidController, 1, MHZ, MHZ, MHZ, window=0)

    def test_on_target_holds_nominal(self):
        ctrl = self._controller()
        self.assertEqual(pid_step(ctrl, _sample(10), LEVELS), 100 * MHZ)
        self.assertEqual(ctrl.integral, 0.0)

    def test_shortfall_raises_frequency(self):
        ctrl = self._controller()
        # e = 1, I = 1: 100 MHz * (1 + 0.5 + 0.2) snaps to 175 MHz
        self.assertEqual(pid_step(ctrl, _sample(0), LEVELS), 175 * MHZ)
        self.assertEqual(ctrl.integral, 1.0)

    def test_stalled_pe_does_not_integrate(self):
        ctrl = self._controller(busy_floor=0.995)
        # e = 1 but busy 0.5: proportional term only
        self.assertEqual(pid_step(ctrl, _sample(0, busy=5), LEVELS), 150 * MHZ)
        self.assertEqual(ctrl.integral, 0.0)
        self.assertEqual(pid_step(ctrl, _sample(0), LEVELS), 175 * MHZ)
        self.assertEqual(ctrl.integral, 1.0)

    def test_busy_floor_is_off_by_default(self):
        ctrl = self._controller()
        self.assertIsNone(ctrl.busy_floor)
        self.assertEqual(pid_step(ctrl, _sample(0, busy=5), LEVELS), 175 * MHZ)
        self.assertEqual(ctrl.integral, 1.0)

    def test_single_step_arithmetic(self):
        levels = [f * MHZ for f in range(100, 501, 4)]
        ctrl = PidController(1000, 400 * MHZ, 100 * MHZ, 500 * MHZ, kp=0.5,
                             ki=0.2, window=FS_PER_SECOND)
        sample = WindowSample(0, FS_PER_SECOND, 800, 90, 100)
        # e = 0.2, u = 0.5 * 0.2 + 0.2 * 0.2
        self.assertEqual(pid_step(ctrl, sample, levels), 456 * MHZ)
        self.assertAlmostEqual(ctrl.integral, 0.2)
        self.assertAlmostEqual(ctrl.prev_error, 0.2)

    def test_overshoot_lowers_frequency_until_sign_change(self):
        ctrl = PidController(10 ** 6, 100 * MHZ, 50 * MHZ, 200 * MHZ,
                             window=WINDOW)
        lo, _ = ctrl.integral_limits()
        f, outputs = 100 * MHZ, []
        for _ in range(12):
            f = ctrl.step(_sample(11), LEVELS, f)
            outputs.append(f)
            self.assertGreaterEqual(ctrl.integral, lo)
        self.assertEqual(outputs[:5], [75 * MHZ, 75 * MHZ, 75 * MHZ,
                                       50 * MHZ, 50 * MHZ])
        self.assertTrue(all(b <= a for a, b in zip(outputs, outputs[1:])),
                        outputs)
        # held at f_min without winding further down
        self.assertEqual(outputs[-1], 50 * MHZ)
        self.assertEqual(ctrl.step(_sample(9), LEVELS, f), 75 * MHZ)

    def test_integral_is_clamped(self):
        ctrl = self._controller(kp=0.0)
        self.assertEqual(ctrl.integral_limits(), (-2.5, 5.0))
        outputs = [pid_step(ctrl, _sample(0), LEVELS) for _ in range(10)]
        self.assertEqual(outputs[:5], [125 * MHZ, 150 * MHZ, 150 * MHZ,
                                       175 * MHZ, 200 * MHZ])
        self.assertEqual(outputs[-1], 200 * MHZ)
        self.assertEqual(ctrl.integral, 5.0)
        # overshoot unwinds from the clamp, not from an accumulated excess
        self.assertEqual(pid_step(ctrl, _sample(20), LEVELS), 175 * MHZ)
        self.assertEqual(ctrl.integral, 4.0)

    def test_window_mismatch(self):
        ctrl = self._controller()
        self.assertRaises(ValueError, ctrl.step, _sample(10, window=WINDOW + 1),
                          LEVELS)
        self.assertRaises(ConfigError, ctrl.step, _sample(10), [])

    def test_converges_on_plant(self):
        cycles = 100
        ctrl = PidController(10 ** 6, 80 * MHZ, 50 * MHZ, 200 * MHZ, kp=0.5,
                             ki=0.2, window=WINDOW)
        f, history = 80 * MHZ, []
        for _ in range(12):
            tokens = f * WINDOW // (cycles * FS_PER_SECOND)
            f = ctrl.step(_sample(tokens), LEVELS, f)
            history.append(f)
        self.assertEqual(history[-6:], [100 * MHZ] * 6)


class TestGovernors(unittest.TestCase):

    def test_lookup(self):
        self.assertIsInstance(Governor.get_governor("static"), StaticGovernor)
        self.assertIsInstance(Governor.get_governor(b"ondemand"), OndemandGovernor)
        gov = Governor.get_governor("conservative", up_threshold=0.9)
        self.assertIsInstance(gov, ConservativeGovernor)
        self.assertEqual(gov.up_threshold, 0.9)
        self.assertEqual(gov.name, "conservative")
        self.assertFalse(gov.is_static)
        gov = Governor.get_governor("pid", setpoint=10 ** 6, f_min=50 * MHZ,
                                    f_max=200 * MHZ, cycles=100)
        self.assertIsInstance(gov, PidGovernor)
        self.assertEqual(gov.controller.f_nominal, 80 * MHZ)

    def test_bad_governor(self):
        with self.assertRaises(ConfigError) as cm:
            Governor.get_governor("performance")
        self.assertIn("Unknown governor 'performance'", str(cm.exception))
        self.assertRaises(ConfigError, StaticGovernor, up_threshold=0.2,
                          down_threshold=0.3)
        self.assertRaises(ConfigError, PidGovernor, 10 ** 6, MHZ, 2 * MHZ)

    def test_static(self):
        gov = StaticGovernor()
        self.assertTrue(gov.is_static)
        self.assertEqual(governor_step(gov, _sample(0), 75 * MHZ, LEVELS), 75 * MHZ)

    def test_ondemand(self):
        gov = OndemandGovernor()
        self.assertEqual(gov.step(_sample(0, busy=9), 75 * MHZ, LEVELS), 200 * MHZ)
        self.assertEqual(gov.step(_sample(0, busy=1), 100 * MHZ, LEVELS), 75 * MHZ)
        self.assertEqual(gov.step(_sample(0, busy=1), 50 * MHZ, LEVELS), 50 * MHZ)
        self.assertEqual(gov.step(_sample(0, busy=5), 100 * MHZ, LEVELS), 100 * MHZ)

    def test_conservative(self):
        gov = ConservativeGovernor()
        self.assertEqual(gov.step(_sample(0, busy=9), 75 * MHZ, LEVELS), 100 * MHZ)
        self.assertEqual(gov.step(_sample(0, busy=9), 200 * MHZ, LEVELS), 200 * MHZ)
        self.assertEqual(gov.step(_sample(0, busy=1), 75 * MHZ, LEVELS), 50 * MHZ)
        self.assertEqual(gov.step(_sample(0, busy=5), 75 * MHZ, LEVELS), 75 * MHZ)
        # off-level frequencies move from their nearest level
        self.assertEqual(gov.step(_sample(0, busy=9), 80 * MHZ, LEVELS), 100 * MHZ)


class TestOptimalStatic(unittest.TestCase):

    def test_pipeline(self):
        graph = chain_scenario([40, 20]).graph
        freqs = optimal_static_frequencies(graph, 10 ** 6)
        self.assertEqual(list(freqs.items()), [("n0", 40 * MHZ), ("n1", 20 * MHZ)])
        graph = chain_scenario([(10, 30), 20]).graph
        self.assertEqual(optimal_static_frequencies(graph, 10 ** 6)["n0"], 20 * MHZ)
