# __init__.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Root of galscmp package."""
from __future__ import absolute_import, division, print_function

from .clocks import ClockDomain, SyncConfig, sync_observe
from .core import (ConfigError, EnumerationOverflowError, FrequencyError,
                   GalsError, GenerationError, Interval, MisalignedEdgeError,
                   PenaltyError, ScenarioSyntaxError, SweepError, TraceError,
                   UnsupportedAnalysisError, ValidationError)
from .dfs import (Governor, PidController, PowerModel, WindowSample, energy,
                  governor_step, optimal_static_frequencies, pid_step)
from .engine import (ChannelConfig, ClockConfig, GovernorConfig, Metrics,
                     PowerConfig, Scenario, SimConfig, penalty, run)
from .experiments import (ReportRow, SweepSpec, compare_sync_gals, dfs_report,
                          emit_csv, run_bundle, sweep)
from .fifo import DualClockFifo
from .scenario import load_scenario, serialize
from .taskgraph import (Channel, Mapping, TaskGraph, TaskNode, bottleneck_rate,
                        detect_comm_loops, generate, remove_feedback_channels,
                        validate)

__version__ = "0.1.0"
