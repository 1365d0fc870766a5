# scenario.py
# -*- coding: utf8 -*-
# vim:fileencoding=utf8 ai ts=4 sts=4 et sw=4
# BSD license - see LICENSE for details

"""Scenario file reader and writer.

A scenario file is a list of ``[section]`` headers followed by
``key = value`` lines; ``#`` starts a comment. The grammar is:

      <file> ::= <line>*
      <line> ::= <section> <eol> | <key> "=" [<value>] <eol> | <eol>
   <section> ::= "[" name "]"
       <key> ::= (character / (whitespace | "=" | "[" | "]" | "#"))+
     <value> ::= (character / (newline | "#"))+

Lexing and parsing use ply. Values are typed by the tables below, which are
the reference for every key that may appear.
"""

from __future__ import absolute_import, division, print_function
from future import standard_library
standard_library.install_aliases()  # noqa: E402

import logging

from builtins import object
from collections import OrderedDict

import ply.lex as lex
import ply.yacc as yacc

from .clocks import DEFAULT_LEVEL_COUNT, DEFAULT_SYNC_STAGES
from .compat import as_lines
from .core import ConfigError, ScenarioSyntaxError, ValidationError
from .dfs import (AUTO, DEFAULT_BUSY_FLOOR, DEFAULT_DOWN_THRESHOLD, DEFAULT_KD,
                  DEFAULT_KI, DEFAULT_KP, DEFAULT_UP_THRESHOLD, DEFAULT_WINDOW,
                  Governor)
from .engine import (DEFAULT_BUS_CYCLES, DEFAULT_DURATION, DEFAULT_FREQUENCY,
                     ChannelConfig, ClockConfig, Disturbance, GovernorConfig,
                     GraphOrigin, PowerConfig, Scenario, SimConfig,
                     validate_scenario)
from .fifo import DEFAULT_FIFO_CAPACITY, FLOW_CONTROL_MODES, MULTIWORD
from .taskgraph import (GENERATORS, INTERCONNECTS, POINT_TO_POINT, Channel,
                        Mapping, TaskGraph, TaskNode, generate,
                        remove_feedback_channels)
from .valuetypes import (DISTURBANCE_FIELDS, NODE_FIELDS, Auto, Bool, Discrete,
                         Endpoints, Float, Frequency, Int, Levels, ListOf,
                         MeshDims, ParamList, Str, Time)

logger = logging.getLogger(__name__)

## @brief Graph kind for graphs written out node by node.
EXPLICIT = "explicit"

GOVERNOR_NAMES = [Governor.GOVERNOR_LOOKUP[k] for k in sorted(Governor.GOVERNOR_LOOKUP)]

GRAPH_KEYS = OrderedDict([
    ("kind", Discrete([EXPLICIT] + list(GENERATORS), default=EXPLICIT)),
    ("params", ParamList(default=())),
    ("seed", Int(min=0, default=0)),
    ("remove_feedback", Bool(default=False)),
    ("interconnect", Discrete(INTERCONNECTS, default=POINT_TO_POINT)),
    ("mesh", MeshDims(optional=True)),
    ("adjacency_check", Bool(optional=True)),
    ("sinks", ListOf(Str(), min_length=1, optional=True)),
    ("origin_kind", Discrete(list(GENERATORS), optional=True)),
    ("origin_params", ParamList(default=())),
    ("origin_seed", Int(min=0, default=0)),
    ("origin_remove_feedback", Bool(default=False)),
])

GRAPH_ITEMS = {
    "node": NODE_FIELDS,
    "channel": Endpoints(),
}

CLOCK_KEYS = OrderedDict([
    ("frequency", Frequency(min=1, default=DEFAULT_FREQUENCY)),
    ("f_min", Frequency(min=1, optional=True)),
    ("f_max", Frequency(min=1, optional=True)),
    ("levels", Levels(default=DEFAULT_LEVEL_COUNT)),
    ("phase", Time(min=0, default=0)),
    ("bus_frequency", Frequency(min=1, optional=True)),
    ("bus_cycles_per_transfer", Int(min=1, default=DEFAULT_BUS_CYCLES)),
])

PE_CLOCK_FIELDS = OrderedDict([
    ("frequency", Frequency(min=1)),
    ("phase", Time(min=0)),
    ("f_min", Frequency(min=1)),
    ("f_max", Frequency(min=1)),
])

CHANNEL_KEYS = OrderedDict([
    ("capacity", Int(min=1, optional=True)),
    ("stages", Int(min=0, default=DEFAULT_SYNC_STAGES)),
    ("flow_control", Discrete(FLOW_CONTROL_MODES, default=MULTIWORD)),
])

CHANNEL_FIELDS = OrderedDict([
    ("capacity", Int(min=1)),
    ("stages", Int(min=0)),
])

GOVERNOR_KEYS = OrderedDict([
    ("kind", Discrete(GOVERNOR_NAMES, default="static")),
    ("kp", Float(default=DEFAULT_KP)),
    ("ki", Float(default=DEFAULT_KI)),
    ("kd", Float(default=DEFAULT_KD)),
    ("setpoint", Auto(Float(min=0), default=AUTO)),
    ("f_nominal", Auto(Frequency(min=1), default=AUTO)),
    ("window", Time(min=1, default=DEFAULT_WINDOW)),
    ("up_threshold", Float(min=0, max=1, default=DEFAULT_UP_THRESHOLD)),
    ("down_threshold", Float(min=0, max=1, default=DEFAULT_DOWN_THRESHOLD)),
    ("busy_floor", Float(min=0, max=1, default=DEFAULT_BUSY_FLOOR, optional=True)),
])

PE_GOVERNOR_FIELDS = OrderedDict([
    ("kind", Discrete(GOVERNOR_NAMES)),
])

POWER_KEYS = OrderedDict([
    ("switched_capacitance", Float(min=0, default=1.0)),
    ("leakage", Float(min=0, default=0.0)),
    ("v_min", Float(min=0, default=0.8)),
    ("v_max", Float(min=0, default=1.3)),
])

SIM_KEYS = OrderedDict([
    ("duration", Time(min=1, default=DEFAULT_DURATION)),
    ("warmup", Auto(Time(min=0), default=AUTO)),
    ("seed", Int(min=0, default=0)),
])

SECTIONS = ("graph", "clocks", "channels", "governor", "power", "sim",
            "disturbance")


class ScenarioLexer(object):
    """Lexer definition for scenario files."""
    states = (
        ('value', 'exclusive'),
    )

    tokens = (
        'NEWLINE',
        'SECTION',
        'KEY',
        'EQUALS',
        'VALUE',
    )

    t_ANY_ignore = " \t"

    t_ANY_ignore_COMMENT = r'\#[^\n]*'

    def t_ANY_NEWLINE(self, t):
        r'\n+'
        t.lexer.lineno += len(t.value)
        t.lexer.begin("INITIAL")
        return t

    def t_SECTION(self, t):
        r'\[[^\]\n]*\]'
        t.value = t.value[1:-1].strip()
        return t

    def t_EQUALS(self, t):
        r'='
        t.lexer.begin("value")
        return t

    t_KEY = r'[^\s=\[\]\#]+'

    def t_error(self, t):
        """Error handler."""
        raise ScenarioSyntaxError("unexpected character %r" % (t.value[0],),
                                  t.lexer.lineno)

    def t_value_VALUE(self, t):
        r'[^\n\#]+'
        t.value = t.value.strip()
        return t

    def t_value_error(self, t):
        """Value error handler."""
        raise ScenarioSyntaxError("unexpected character %r in value"
                                  % (t.value[0],), t.lexer.lineno)


class ScenarioGrammar(object):
    """Grammar definition for scenario files.

    Produces a list of ``(section, None, None, lineno)`` and
    ``(None, key, value, lineno)`` tuples in file order.
    """

    tokens = ScenarioLexer.tokens

    def p_file(self, p):
        """file : file line
                | empty"""
        if len(p) == 3:
            p[0] = p[1] + p[2]
        else:
            p[0] = []

    def p_line_section(self, p):
        """line : SECTION NEWLINE"""
        p[0] = [(p[1], None, None, p.lineno(1))]

    def p_line_entry(self, p):
        """line : KEY EQUALS VALUE NEWLINE"""
        p[0] = [(None, p[1], p[3], p.lineno(1))]

    def p_line_empty_value(self, p):
        """line : KEY EQUALS NEWLINE"""
        p[0] = [(None, p[1], "", p.lineno(1))]

    def p_line_blank(self, p):
        """line : NEWLINE"""
        p[0] = []

    def p_empty(self, p):
        """empty :"""
        pass

    def p_error(self, p):
        """Error handler."""
        if p is None:
            raise ScenarioSyntaxError("unexpected end of file")
        raise ScenarioSyntaxError("unexpected %r" % (p.value,), p.lineno)


class ScenarioParser(object):
    """Wraps Lexer and Grammar Objects"""

    def __init__(self):
        self._lexer = lex.lex(object=ScenarioLexer(), debug=0)
        self._parser = yacc.yacc(module=ScenarioGrammar(), debug=0,
                                 write_tables=0)

    def parse(self, text):
        """Parse scenario text into section and entry tuples."""
        self._lexer.begin("INITIAL")
        self._lexer.lineno = 1
        text = "\n".join(as_lines(text)) + "\n"
        return self._parser.parse(text, lexer=self._lexer, tracking=True)


_PARSER = None


def _parser():
    global _PARSER
    if _PARSER is None:
        _PARSER = ScenarioParser()
    return _PARSER


def _unpack(vtype, text, section, key, lineno):
    try:
        return vtype.unpack(text)
    except ValueError as e:
        raise ScenarioSyntaxError("[%s] %s: %s" % (section, key, e), lineno)


class _Section(object):
    """Entries of one section checked against its key tables.

    Parameters
    ----------
    name : str
        Section name.
    entries : OrderedDict
        Key to (value text, line number).
    keys : OrderedDict
        Fixed key to value type.
    items : dict, optional
        Prefix to either a value type (``prefix.<id> = value``) or a field
        table (``prefix.<id>.<field> = value``).
    """

    def __init__(self, name, entries, keys, items=None):
        self.name = name
        self.values = {}
        self.items = OrderedDict((prefix, OrderedDict()) for prefix in items or {})
        self.lines = {}
        for key, (text, lineno) in entries.items():
            self.lines[key] = lineno
            if key in keys:
                self.values[key] = _unpack(keys[key], text, name, key, lineno)
                continue
            prefix, _, rest = key.partition(".")
            spec = (items or {}).get(prefix)
            if spec is None or not rest:
                raise ScenarioSyntaxError("unknown key %r in section [%s]"
                                          % (key, name), lineno)
            if isinstance(spec, dict):
                item, _, field = rest.rpartition(".")
                if not item or field not in spec:
                    raise ScenarioSyntaxError(
                        "unknown key %r in section [%s] (fields are %s)"
                        % (key, name, list(spec)), lineno)
                found = self.items[prefix].setdefault(item, {})
                found[field] = _unpack(spec[field], text, name, key, lineno)
            else:
                self.items[prefix][rest] = _unpack(spec, text, name, key, lineno)
        for key, vtype in keys.items():
            if key not in self.values:
                self.values[key] = vtype.get_default()

    def __getitem__(self, key):
        return self.values[key]

    def given(self, key):
        return key in self.lines

    def line_of(self, key):
        return self.lines.get(key)


def _int_ids(items, section, prefix, lines):
    """Re-key a channel item table by integer channel id."""
    result = OrderedDict()
    for cid, value in items.items():
        try:
            result[int(cid)] = value
        except ValueError:
            key = "%s.%s" % (prefix, cid)
            found = [n for k, n in lines.items()
                     if k == key or k.startswith(key + ".")]
            raise ScenarioSyntaxError("channel id %r in section [%s] is not an "
                                      "integer" % (cid, section),
                                      min(found) if found else None)
    return result


def _group(entries):
    sections = OrderedDict()
    current = None
    for section, key, value, lineno in entries:
        if section is not None:
            if section not in SECTIONS:
                raise ScenarioSyntaxError("unknown section [%s] (expected one of %s)"
                                          % (section, list(SECTIONS)), lineno)
            if section in sections:
                raise ScenarioSyntaxError("section [%s] appears twice" % (section,),
                                          lineno)
            current = sections[section] = OrderedDict()
            continue
        if current is None:
            raise ScenarioSyntaxError("key %r appears before any section" % (key,),
                                      lineno)
        if key in current:
            raise ScenarioSyntaxError("key %r given twice" % (key,), lineno)
        current[key] = (value, lineno)
    return sections


def _explicit_graph(graph):
    nodes, placement = [], {}
    for node_id, spec in graph.items["node"].items():
        nodes.append(TaskNode(node_id, spec["cycles"],
                              list(spec.get("in", {}).items()),
                              list(spec.get("out", {}).items()),
                              spec.get("seed")))
        if "at" in spec:
            placement[node_id] = spec["at"]
    channels = []
    for cid, spec in _int_ids(graph.items["channel"], "graph", "channel",
                              graph.lines).items():
        channels.append(Channel(cid, spec["src"], spec["src_port"], spec["dst"],
                                spec["dst_port"],
                                spec.get("capacity", DEFAULT_FIFO_CAPACITY),
                                spec.get("initial", 0)))
    mesh = graph["mesh"]
    if mesh is None:
        xs = [x for x, _ in placement.values()] or [0]
        ys = [y for _, y in placement.values()] or [0]
        mesh = (max(xs) + 1, max(ys) + 1)
    adjacency = graph["adjacency_check"]
    mapping = Mapping(placement, mesh, graph["interconnect"],
                      True if adjacency is None else adjacency)
    sinks = graph["sinks"]
    origin = None
    if graph["origin_kind"] is not None:
        origin = GraphOrigin(graph["origin_kind"], graph["origin_params"],
                             graph["origin_seed"], graph["origin_remove_feedback"])
    return TaskGraph(nodes, channels, sinks), mapping, origin


def _generated_graph(graph):
    for key in graph.lines:
        if key.partition(".")[0] in ("node", "channel", "mesh", "sinks") or \
                key.startswith("origin_"):
            raise ScenarioSyntaxError("key %r is only allowed for explicit graphs"
                                      % (key,), graph.line_of(key))
    kind = graph["kind"]
    params, seed = graph["params"], graph["seed"]
    task_graph, mapping = generate(kind, dict(params), seed)
    if graph["remove_feedback"]:
        task_graph, _ = remove_feedback_channels(task_graph)
    mapping = mapping._replace(interconnect=graph["interconnect"])
    if graph["adjacency_check"] is not None:
        mapping = mapping._replace(adjacency_check=graph["adjacency_check"])
    return task_graph, mapping, GraphOrigin(kind, params, seed,
                                            graph["remove_feedback"])


def load_scenario(text):
    """Parse, fill defaults and validate a scenario.

    Parameters
    ----------
    text : str or bytes
        Scenario file contents.

    Returns
    -------
    scenario : :class:`galscmp.engine.Scenario`

    Raises
    ------
    ScenarioSyntaxError
        For malformed lines, unknown sections or keys and bad values, with
        the line number.
    ValidationError
        Listing every semantic problem of the assembled scenario.
    """
    sections = _group(_parser().parse(text))
    if "graph" not in sections:
        raise ConfigError("scenario has no [graph] section")
    empty = OrderedDict()
    graph = _Section("graph", sections["graph"], GRAPH_KEYS, GRAPH_ITEMS)
    if graph["kind"] == EXPLICIT:
        for key in ("params", "seed", "remove_feedback"):
            if graph.given(key):
                raise ScenarioSyntaxError("key %r needs a generated graph kind"
                                          % (key,), graph.line_of(key))
        task_graph, mapping, origin = _explicit_graph(graph)
    else:
        task_graph, mapping, origin = _generated_graph(graph)

    clocks = _Section("clocks", sections.get("clocks", empty), CLOCK_KEYS,
                      {"pe": PE_CLOCK_FIELDS})
    clock_config = ClockConfig(
        clocks["frequency"], clocks["f_min"], clocks["f_max"], clocks["levels"],
        clocks["phase"], clocks.items["pe"], clocks["bus_frequency"],
        clocks["bus_cycles_per_transfer"])

    channels = _Section("channels", sections.get("channels", empty), CHANNEL_KEYS,
                        {"channel": CHANNEL_FIELDS})
    channel_config = ChannelConfig(
        channels["capacity"], channels["stages"], channels["flow_control"],
        _int_ids(channels.items["channel"], "channels", "channel", channels.lines))

    governor = _Section("governor", sections.get("governor", empty), GOVERNOR_KEYS,
                        {"pe": PE_GOVERNOR_FIELDS})
    governor_config = GovernorConfig(
        governor["kind"], dict((pe, fields["kind"])
                               for pe, fields in governor.items["pe"].items()),
        governor["kp"], governor["ki"], governor["kd"], governor["setpoint"],
        governor["f_nominal"], governor["window"], governor["up_threshold"],
        governor["down_threshold"], governor["busy_floor"])

    power = _Section("power", sections.get("power", empty), POWER_KEYS)
    power_config = PowerConfig(power["switched_capacitance"], power["leakage"],
                               power["v_min"], power["v_max"])

    sim = _Section("sim", sections.get("sim", empty), SIM_KEYS)
    warmup = None if sim["warmup"] == AUTO else sim["warmup"]
    sim_config = SimConfig(sim["duration"], warmup, sim["seed"])

    disturbance = _Section("disturbance", sections.get("disturbance", empty),
                           OrderedDict(), {"node": DISTURBANCE_FIELDS})
    disturbances = [Disturbance(node, spec["at"], spec["cycles"])
                    for node, spec in disturbance.items["node"].items()]

    scenario = Scenario(task_graph, mapping, clock_config, channel_config,
                        governor_config, power_config, sim_config, disturbances,
                        origin)
    errors = validate_scenario(scenario)
    if errors:
        raise ValidationError(errors, prefix="invalid scenario")
    logger.debug("Loaded scenario with %d nodes and %d channels",
                 len(task_graph.nodes), len(task_graph.channels))
    return scenario


def _emit(lines, keys, key, value):
    if value is not None:
        lines.append("%s = %s" % (key, keys[key].pack(value)))


def serialize(scenario):
    """Scenario file text that :func:`load_scenario` reads back unchanged.

    The graph is always written node by node; a generated graph keeps its
    provenance in the ``origin_*`` keys.
    """
    graph, mapping = scenario.graph, scenario.mapping
    lines = ["[graph]", "kind = %s" % EXPLICIT]
    _emit(lines, GRAPH_KEYS, "interconnect", mapping.interconnect)
    _emit(lines, GRAPH_KEYS, "mesh", mapping.mesh_dims)
    _emit(lines, GRAPH_KEYS, "adjacency_check", mapping.adjacency_check)
    _emit(lines, GRAPH_KEYS, "sinks", graph.sinks)
    for node in graph.nodes.values():
        spec = {"cycles": node.compute_cycles, "at": mapping.placement.get(node.id),
                "seed": node.seed}
        if node.consume:
            spec["in"] = OrderedDict(node.consume)
        if node.produce:
            spec["out"] = OrderedDict(node.produce)
        spec = dict((k, v) for k, v in spec.items() if v is not None)
        lines.append("node.%s = %s" % (node.id, NODE_FIELDS.pack(spec)))
    for c in graph.channels.values():
        spec = {"src": c.src, "src_port": c.src_port, "dst": c.dst,
                "dst_port": c.dst_port, "capacity": c.capacity,
                "initial": c.initial_tokens}
        lines.append("channel.%d = %s" % (c.id, GRAPH_ITEMS["channel"].pack(spec)))
    origin = scenario.origin
    if origin is not None:
        _emit(lines, GRAPH_KEYS, "origin_kind", origin.kind)
        _emit(lines, GRAPH_KEYS, "origin_params", origin.params)
        _emit(lines, GRAPH_KEYS, "origin_seed", origin.seed)
        _emit(lines, GRAPH_KEYS, "origin_remove_feedback", origin.remove_feedback)

    clocks = scenario.clocks
    lines.extend(["", "[clocks]"])
    for key in CLOCK_KEYS:
        _emit(lines, CLOCK_KEYS, key, getattr(clocks, key))
    for pe_id in sorted(clocks.overrides):
        for field, value in sorted(clocks.overrides[pe_id].items()):
            lines.append("pe.%s.%s = %s" % (pe_id, field,
                                            PE_CLOCK_FIELDS[field].pack(value)))

    channels = scenario.channels
    lines.extend(["", "[channels]"])
    for key in CHANNEL_KEYS:
        _emit(lines, CHANNEL_KEYS, key, getattr(channels, key))
    for cid in sorted(channels.overrides):
        for field, value in sorted(channels.overrides[cid].items()):
            lines.append("channel.%d.%s = %s" % (cid, field,
                                                 CHANNEL_FIELDS[field].pack(value)))

    governor = scenario.governor
    lines.extend(["", "[governor]"])
    for key in GOVERNOR_KEYS:
        _emit(lines, GOVERNOR_KEYS, key, getattr(governor, key))
    for pe_id in sorted(governor.overrides):
        lines.append("pe.%s.kind = %s" % (pe_id, governor.overrides[pe_id]))

    lines.extend(["", "[power]"])
    for key in POWER_KEYS:
        _emit(lines, POWER_KEYS, key, getattr(scenario.power, key))

    sim = scenario.sim
    lines.extend(["", "[sim]"])
    _emit(lines, SIM_KEYS, "duration", sim.duration)
    _emit(lines, SIM_KEYS, "warmup", AUTO if sim.warmup is None else sim.warmup)
    _emit(lines, SIM_KEYS, "seed", sim.seed)

    if scenario.disturbances:
        lines.extend(["", "[disturbance]"])
        seen = set()
        for d in scenario.disturbances:
            if d.node in seen:
                raise ConfigError("only one disturbance per node can be written, "
                                  "node %r has several" % (d.node,))
            seen.add(d.node)
            lines.append("node.%s = %s" % (d.node, DISTURBANCE_FIELDS.pack(
                {"at": d.at, "cycles": d.cycles})))
    return "\n".join(lines) + "\n"
