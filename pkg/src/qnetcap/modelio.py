"""Network configuration documents, bundled models, and result tables.

Configs are YAML with three sections (``network``, ``integrator``,
``sweep`` plus an optional ``model`` header).  Site indices in documents
are one-based; energies and hoppings carry a declared unit (``rad/ps`` or
``cm^-1``), noise rates are always 1/ps.  Parsing is strict: unknown keys
are rejected with their document location.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources

import numpy as np
import yaml

from .dynamics import IntegratorConfig, NetworkSpec, SINK, SinkSpec

# Energy conversion: angular frequency per wavenumber, 2*pi*c in rad/ps per cm^-1.
WAVENUMBER_TO_RAD_PER_PS = 0.1883651567

UNIT_RAD_PER_PS = "rad/ps"
UNIT_WAVENUMBER = "cm^-1"

BUILTIN_MODELS = {
    "twosite": "two resonant sites with unit hopping and no noise (analytic benchmark)",
    "threesite": "fully connected three-site network with strong dephasing on the middle site",
    "fmo7": "seven-site pigment-protein network with a sink on site 3 (representative parameters)",
}

_TOP_KEYS = {"model", "network", "integrator", "sweep"}
_MODEL_KEYS = {"name", "description"}
_NETWORK_KEYS = {
    "sites",
    "omega",
    "omega_unit",
    "hoppings",
    "dephasing",
    "dissipation",
    "sink",
    "input",
    "output",
}
_SINK_KEYS = {"site", "rate"}
_INTEGRATOR_KEYS = {"dt", "t_max", "method", "error_check"}
_SWEEP_KEYS = {"t_steps", "dephasing_scale"}


class ConfigError(ValueError):
    """Malformed or semantically invalid configuration document."""


@dataclass(frozen=True)
class SweepSettings:
    """Defaults for time sweeps driven from a config document."""

    t_steps: int = 200
    dephasing_scale: float = 1.0

    def __post_init__(self):
        if self.t_steps < 1:
            raise ValueError("t_steps must be at least 1")
        if self.dephasing_scale < 0.0:
            raise ValueError("dephasing_scale must be nonnegative")


@dataclass(frozen=True)
class ResultTable:
    """Rectangular table of real values with a fixed column order."""

    columns: tuple
    rows: tuple

    def __post_init__(self):
        columns = tuple(str(c) for c in self.columns)
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(
                    f"row of width {len(row)} in a table with {len(columns)} columns"
                )
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", rows)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def table_text(table: ResultTable) -> str:
    """CSV rendering: header first, 12 significant digits, newline-terminated."""
    lines = [",".join(table.columns)]
    for row in table.rows:
        lines.append(",".join(f"{v + 0.0:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def write_table(table: ResultTable, destination) -> None:
    """Write a table as CSV to a path or writable text stream."""
    text = table_text(table)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="ascii") as fh:
            fh.write(text)


def parse_table(text: str) -> ResultTable:
    """Inverse of :func:`table_text`; used to reload written results."""
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise ValueError("empty table text")
    columns = tuple(lines[0].split(","))
    rows = tuple(tuple(float(v) for v in line.split(",")) for line in lines[1:])
    return ResultTable(columns=columns, rows=rows)


def _collect_marks(node, path, marks):
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key_path = f"{path}.{key_node.value}" if path else str(key_node.value)
            marks[key_path] = (key_node.start_mark.line + 1, key_node.start_mark.column + 1)
            _collect_marks(value_node, key_path, marks)
    elif isinstance(node, yaml.SequenceNode):
        for i, child in enumerate(node.value):
            child_path = f"{path}[{i}]"
            marks[child_path] = (child.start_mark.line + 1, child.start_mark.column + 1)
            _collect_marks(child, child_path, marks)


def _load_document(text: str):
    try:
        data = yaml.safe_load(io.StringIO(text))
        root = yaml.compose(io.StringIO(text))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"syntax error{where}: {getattr(exc, 'problem', exc)}") from exc
    marks = {}
    if root is not None:
        _collect_marks(root, "", marks)
    return data, marks


class _Reader:
    """Strict mapping access with document locations in error messages."""

    def __init__(self, data, marks):
        self.data = data
        self.marks = marks

    def _where(self, path):
        mark = self.marks.get(path)
        return f" (line {mark[0]}, column {mark[1]})" if mark else ""

    def fail(self, path, message):
        raise ConfigError(f"{path}: {message}{self._where(path)}")

    def section(self, data, path, allowed, required=()):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            self.fail(path, "expected a mapping")
        for key in data:
            full = f"{path}.{key}" if path else str(key)
            if key not in allowed:
                raise ConfigError(f"unknown key '{full}'{self._where(full)}")
        for key in required:
            if key not in data:
                self.fail(path or "document", f"missing required key '{key}'")
        return data

    def number(self, data, path, minimum=None):
        value = data
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {value!r}")
        if minimum is not None and value < minimum:
            self.fail(path, f"value {value} must be >= {minimum}")
        return float(value)

    def integer(self, data, path, minimum=None):
        if isinstance(data, bool) or not isinstance(data, int):
            self.fail(path, f"expected an integer, got {data!r}")
        if minimum is not None and data < minimum:
            self.fail(path, f"value {data} must be >= {minimum}")
        return int(data)

    def number_list(self, data, path, length, minimum=None):
        if not isinstance(data, list):
            self.fail(path, "expected a list of numbers")
        if len(data) != length:
            self.fail(path, f"expected {length} entries, got {len(data)}")
        return tuple(
            self.number(v, f"{path}[{i}]", minimum=minimum) for i, v in enumerate(data)
        )


def parse_config(text: str):
    """Parse and validate a config document.

    :return: ``(NetworkSpec, IntegratorConfig, SweepSettings)``
    :raises ConfigError: on syntax errors (with line/column) or semantic
        errors (naming the offending key).
    """
    data, marks = _load_document(text)
    reader = _Reader(data, marks)
    top = reader.section(data, "", _TOP_KEYS, required=("network", "integrator"))
    reader.section(top.get("model"), "model", _MODEL_KEYS)

    net = reader.section(top["network"], "network", _NETWORK_KEYS,
                         required=("sites", "omega", "omega_unit", "hoppings",
                                   "dephasing", "dissipation"))
    n = reader.integer(net["sites"], "network.sites", minimum=1)

    unit = net["omega_unit"]
    if unit not in (UNIT_RAD_PER_PS, UNIT_WAVENUMBER):
        reader.fail(
            "network.omega_unit",
            f"expected '{UNIT_RAD_PER_PS}' or '{UNIT_WAVENUMBER}', got {unit!r}",
        )
    factor = WAVENUMBER_TO_RAD_PER_PS if unit == UNIT_WAVENUMBER else 1.0

    omega = tuple(x * factor for x in reader.number_list(net["omega"], "network.omega", n))

    hoppings = net["hoppings"]
    if not isinstance(hoppings, list):
        reader.fail("network.hoppings", "expected a list of [j, l, value] triples")
    v = np.zeros((n, n))
    seen = set()
    for i, triple in enumerate(hoppings):
        path = f"network.hoppings[{i}]"
        if not isinstance(triple, list) or len(triple) != 3:
            reader.fail(path, "expected a [j, l, value] triple")
        j = reader.integer(triple[0], path, minimum=1)
        l = reader.integer(triple[1], path, minimum=1)
        if j > n or l > n:
            reader.fail(path, f"site index out of range 1..{n}")
        if j == l:
            reader.fail(path, "hopping requires two distinct sites")
        key = (min(j, l), max(j, l))
        if key in seen:
            reader.fail(path, f"duplicate hopping for sites {key}")
        seen.add(key)
        value = reader.number(triple[2], path) * factor
        v[j - 1, l - 1] = v[l - 1, j - 1] = value

    deph = reader.number_list(net["dephasing"], "network.dephasing", n, minimum=0.0)
    diss = reader.number_list(net["dissipation"], "network.dissipation", n, minimum=0.0)

    sink = None
    if "sink" in net and net["sink"] is not None:
        sink_map = reader.section(net["sink"], "network.sink", _SINK_KEYS,
                                  required=("site", "rate"))
        site = reader.integer(sink_map["site"], "network.sink.site", minimum=1)
        if site > n:
            reader.fail("network.sink.site", f"site index out of range 1..{n}")
        rate = reader.number(sink_map["rate"], "network.sink.rate", minimum=0.0)
        sink = SinkSpec(site=site - 1, rate=rate)

    input_site = reader.integer(net.get("input", 1), "network.input", minimum=1)
    if input_site > n:
        reader.fail("network.input", f"site index out of range 1..{n}")

    output_raw = net.get("output", n)
    if output_raw == SINK:
        if sink is None:
            reader.fail("network.output", "output is the sink but no sink is configured")
        output = SINK
    else:
        output = reader.integer(output_raw, "network.output", minimum=1)
        if output > n:
            reader.fail("network.output", f"site index out of range 1..{n}")
        output = output - 1

    try:
        spec = NetworkSpec(
            n_sites=n,
            omega=omega,
            v=tuple(tuple(row) for row in v),
            gamma_deph=deph,
            gamma_diss=diss,
            sink=sink,
            input_site=input_site - 1,
            output=output,
        )
    except ValueError as exc:
        raise ConfigError(f"network: {exc}") from exc

    integ = reader.section(top["integrator"], "integrator", _INTEGRATOR_KEYS,
                           required=("dt", "t_max"))
    try:
        cfg = IntegratorConfig(
            dt=reader.number(integ["dt"], "integrator.dt"),
            t_max=reader.number(integ["t_max"], "integrator.t_max"),
            method=integ.get("method", "rk4"),
            error_check=reader.number(integ.get("error_check", 0.0),
                                      "integrator.error_check", minimum=0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc

    sweep_map = reader.section(top.get("sweep"), "sweep", _SWEEP_KEYS)
    try:
        sweep = SweepSettings(
            t_steps=reader.integer(sweep_map.get("t_steps", 200), "sweep.t_steps"),
            dephasing_scale=reader.number(
                sweep_map.get("dephasing_scale", 1.0), "sweep.dephasing_scale"
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc

    return spec, cfg, sweep


def serialize_config(
    spec: NetworkSpec, cfg: IntegratorConfig, sweep: SweepSettings | None = None
) -> str:
    """Render a spec back into a document; parse_config round-trips it exactly."""
    sweep = sweep if sweep is not None else SweepSettings()
    hoppings = []
    for j in range(spec.n_sites):
        for l in range(j + 1, spec.n_sites):
            value = spec.v[j][l]
            if value != 0.0:
                hoppings.append([j + 1, l + 1, value])
    network = {
        "sites": spec.n_sites,
        "omega": list(spec.omega),
        "omega_unit": UNIT_RAD_PER_PS,
        "hoppings": hoppings,
        "dephasing": list(spec.gamma_deph),
        "dissipation": list(spec.gamma_diss),
    }
    if spec.sink is not None:
        network["sink"] = {"site": spec.sink.site + 1, "rate": spec.sink.rate}
    network["input"] = spec.input_site + 1
    network["output"] = SINK if spec.output == SINK else int(spec.output) + 1
    document = {
        "network": network,
        "integrator": {
            "dt": cfg.dt,
            "t_max": cfg.t_max,
            "method": cfg.method,
            "error_check": cfg.error_check,
        },
        "sweep": {"t_steps": sweep.t_steps, "dephasing_scale": sweep.dephasing_scale},
    }
    return yaml.safe_dump(document, sort_keys=False, default_flow_style=None)


def builtin_model(name: str) -> str:
    """Text of a bundled model config; names listed in BUILTIN_MODELS."""
    if name not in BUILTIN_MODELS:
        known = ", ".join(sorted(BUILTIN_MODELS))
        raise ValueError(f"unknown model {name!r}; available: {known}")
    return (resources.files("qnetcap.models") / f"{name}.yaml").read_text(encoding="ascii")
