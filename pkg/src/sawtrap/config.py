"""Experiment configuration: YAML schema, validation and round-tripping.

A config is a YAML mapping with a ``schema_version`` field, the run-level
keys (subcommand, seed, output, format, sweep) and one block per module.
Every block is optional in the file; missing fields take the defaults
below.  Validation errors carry the dotted field path and, when the field
appears in the file, its line and column.
"""

import copy
import hashlib
import json
import re
from dataclasses import dataclass

import yaml

from .constants import DEBYE_VM_TO_GHZ
from .errors import ConfigError


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads 1e5 / 5.0e5 as floats (YAML 1.2 style)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)

SCHEMA_VERSION = 1
SUBCOMMANDS = (
    "fields",
    "stark",
    "trap-map",
    "trap-layers",
    "multilayer",
    "anderson",
    "shielding",
    "hubbard-params",
    "phase-diagram",
    "acoustics",
)
MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class Field:
    kind: str  # float, int, bool, str, floats
    default: object
    check: str = None  # pos, nonneg, or None
    choices: tuple = None
    nullable: bool = False


def F(default, check=None, nullable=False):
    return Field("float", default, check, nullable=nullable)


def I(default, check=None):  # noqa: E743
    return Field("int", default, check)


def S(default, choices=None, nullable=False):
    return Field("str", default, choices=choices, nullable=nullable)


def B(default):
    return Field("bool", default)


def L(default, nullable=False):
    return Field("floats", default, nullable=nullable)


SCHEMA = {
    "layer": {
        "M": I(1, "pos"),
        "k": F(50.0, "pos"),
        "velocity": F(3000.0, "pos"),
        "V0": F(0.0),
        "V1": F(0.0),
        "V2": F(1.0),
        "B0": F(1.0),
        "D": F(0.02, "pos"),
        "index": I(1),
        "u1": F(1.0),
        "u2": F(1.0),
    },
    "fields": {
        "x_start": F(0.0),
        "x_stop": F(0.12566370614359174),
        "x_count": I(25, "pos"),
        "z_start": F(0.001, "nonneg"),
        "z_stop": F(0.019, "nonneg"),
        "z_count": I(10, "pos"),
        "t": F(0.0),
    },
    "molecule": {
        "preset": S("CO", nullable=True),
        "dipole": F(0.167, "nonneg"),
        "doublet": F(0.4),
        "J": F(1.0, "pos"),
        "m": I(1),
        "Omega": I(1),
        "seeker_sign": I(1),
        "mass": F(28.0, "pos"),
        "omega1": F(0.0),
        "E_Lambda": F(None, nullable=True),
        "conversion": F(DEBYE_VM_TO_GHZ, "pos"),
    },
    "stark": {
        "z": F(0.01, "nonneg"),
        "u_start": F(0.0),
        "u_stop": F(2.0e5),
        "u_count": I(51, "pos"),
    },
    "profile": {
        "kind": S("power_law", ("power_law", "sinusoidal", "polynomial", "tabulated")),
        "f_E": F(3.0e7),
        "n": F(0.5),
        "coefficients": L([]),
        "envelope": S("none", ("none", "sine", "cosine")),
        "envelope_rate": F(0.0),
        "z_table": L([]),
        "e_table": L([]),
        "regularizer": F(0.01, "pos"),
        "gain": F(1.0, "nonneg"),
        "scan_points": I(2000, "pos"),
    },
    "stack": {
        "heights": L(None, nullable=True),
        "n": I(3, "pos"),
        "bottom": F(0.01),
        "spacing": F(0.01, "pos"),
        "mass": F(1.0, "pos"),
        "trap_frequency": F(1.0),
        "alpha": F(8.0, "pos"),
        "R0": F(0.04, "pos"),
        "xi": F(0.01),
    },
    "lattice": {
        "N": I(5, "pos"),
        "spacing": F(0.1, "pos"),
        "U0": F(2.0),
        "c": F(0.4),
        "T": F(10.0, "pos"),
        "method": S("spectral", ("spectral", "rk")),
        "initial": S("localized", ("localized", "uniform", "random")),
        "site": I(1, "pos"),
        "n_samples": I(101, "pos"),
    },
    "shielding": {
        "N": I(10, "pos"),
        "V": F(1.0),
        "U0": F(0.1),
        "long_range": S("uniform", ("uniform", "power_law", "off")),
        "gamma": F(None, nullable=True),
        "T": F(10.0, "pos"),
        "method": S("rk", ("spectral", "rk")),
        "initial": S("uniform", ("localized", "uniform", "random")),
    },
    "hubbard": {
        "width": F(0.005, "pos"),
        "k": F(50.0, "pos"),
        "B0": F(100.0),
        "mass": F(0.1, "pos"),
        "wannier_length": F(1e-3, "pos"),
        "velocity": F(3000.0),
        "n0": I(1, "pos"),
        "kinetic": B(False),
        "beta_DeltaU": F(0.0, "nonneg"),
        "perturb": B(False),
        "z_start": F(0.0005, "pos"),
        "z_stop": F(0.02, "pos"),
        "z_count": I(40, "pos"),
        "N_min": I(5, "pos"),
        "N_max": I(15, "pos"),
        "delta_J_min": F(-5.0),
        "delta_J_max": F(5.0),
        "delta_eps_min": F(-100.0),
        "delta_eps_max": F(100.0),
    },
    "acoustics": {
        "kappa": F(2.0, "pos"),
        "mu": F(1.0, "pos"),
        "rho": F(1.0, "pos"),
        "theta": F(0.0),
        "v": F(0.9, "nonneg"),
    },
}

TOP_LEVEL = ("schema_version", "subcommand", "seed", "output", "format", "sweep")


def _marks(node, prefix="", out=None):
    """Map dotted paths to 1-based (line, column) of their value nodes."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for knode, vnode in node.value:
            path = f"{prefix}.{knode.value}" if prefix else str(knode.value)
            out[path] = (knode.start_mark.line + 1, knode.start_mark.column + 1)
            _marks(vnode, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            path = f"{prefix}[{i}]"
            out[path] = (item.start_mark.line + 1, item.start_mark.column + 1)
            _marks(item, path, out)
    return out


class _Validator:
    def __init__(self, marks):
        self.marks = marks

    def error(self, path, message):
        probe = path
        while probe:
            if probe in self.marks:
                line, col = self.marks[probe]
                return ConfigError(path, message, line, col)
            probe = probe.rpartition(".")[0]
        return ConfigError(path, message)

    def value(self, path, spec: Field, v):
        if v is None:
            if spec.nullable:
                return None
            raise self.error(path, "must not be null")
        if spec.kind == "float":
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise self.error(path, f"expected a number, got {v!r}")
            v = float(v)
            if v != v or v in (float("inf"), float("-inf")):
                raise self.error(path, "must be finite")
        elif spec.kind == "int":
            if isinstance(v, bool) or not isinstance(v, int):
                raise self.error(path, f"expected an integer, got {v!r}")
        elif spec.kind == "bool":
            if not isinstance(v, bool):
                raise self.error(path, f"expected true/false, got {v!r}")
        elif spec.kind == "str":
            if not isinstance(v, str):
                raise self.error(path, f"expected a string, got {v!r}")
            if spec.choices and v not in spec.choices:
                raise self.error(path, f"must be one of {list(spec.choices)}, got {v!r}")
        elif spec.kind == "floats":
            if not isinstance(v, list):
                raise self.error(path, f"expected a list of numbers, got {v!r}")
            out = []
            for i, x in enumerate(v):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise self.error(f"{path}[{i}]", f"expected a number, got {x!r}")
                out.append(float(x))
            v = out
        if spec.check == "pos" and not v > 0:
            raise self.error(path, f"must be positive, got {v!r}")
        if spec.check == "nonneg" and not v >= 0:
            raise self.error(path, f"must be non-negative, got {v!r}")
        return v

    def block(self, name, raw):
        schema = SCHEMA[name]
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise self.error(name, "expected a mapping")
        for key in raw:
            if key not in schema:
                raise self.error(f"{name}.{key}", f"unknown field; known: {sorted(schema)}")
        out = {}
        for key, spec in schema.items():
            v = raw.get(key, copy.deepcopy(spec.default))
            out[key] = self.value(f"{name}.{key}", spec, v)
        return out


def field_spec(path):
    block, _, key = path.partition(".")
    try:
        return SCHEMA[block][key]
    except KeyError:
        return None


def default_config():
    return validate({"schema_version": SCHEMA_VERSION})


def _apply_preset(raw_molecule, resolved):
    from .molecule import PRESETS

    name = resolved["preset"]
    if name is None:
        return resolved
    if name.upper() not in PRESETS:
        raise ConfigError("molecule.preset", f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    p = PRESETS[name.upper()]
    given = raw_molecule or {}
    for key in ("dipole", "doublet", "J", "m", "Omega", "seeker_sign", "mass", "omega1"):
        if key not in given:
            resolved[key] = getattr(p, key)
    for key in ("dipole", "doublet", "J", "mass", "omega1"):
        resolved[key] = float(resolved[key])
    return resolved


def validate(raw, marks=None):
    """Fill defaults and check types; returns a plain nested dict."""
    v = _Validator(marks or {})
    if not isinstance(raw, dict):
        raise v.error("(root)", "config must be a mapping")
    for key in raw:
        if key not in TOP_LEVEL and key not in SCHEMA:
            raise v.error(key, f"unknown top-level key; known: {sorted(TOP_LEVEL + tuple(SCHEMA))}")
    ver = raw.get("schema_version")
    if ver is None:
        raise v.error("schema_version", "missing")
    if ver != SCHEMA_VERSION:
        raise v.error("schema_version", f"unsupported version {ver!r}; this build reads {SCHEMA_VERSION}")
    cfg = {"schema_version": SCHEMA_VERSION}
    sub = raw.get("subcommand")
    if sub is not None and sub not in SUBCOMMANDS:
        raise v.error("subcommand", f"must be one of {list(SUBCOMMANDS)}, got {sub!r}")
    cfg["subcommand"] = sub
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise v.error("seed", f"must be an integer in [0, 2^64), got {seed!r}")
    cfg["seed"] = seed
    out = raw.get("output", ".")
    if not isinstance(out, str):
        raise v.error("output", "expected a path string")
    cfg["output"] = out
    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise v.error("format", f"must be 'csv' or 'json', got {fmt!r}")
    cfg["format"] = fmt
    cfg["sweep"] = _sweep(v, raw.get("sweep") or [])
    for name in SCHEMA:
        cfg[name] = v.block(name, raw.get(name))
    cfg["molecule"] = _apply_preset(raw.get("molecule"), cfg["molecule"])
    if cfg["layer"]["index"] not in (1, 2):
        raise v.error("layer.index", "must be 1 or 2")
    return cfg


def _sweep(v, axes):
    if not isinstance(axes, list):
        raise v.error("sweep", "expected a list of axes")
    out = []
    for i, ax in enumerate(axes):
        p = f"sweep[{i}]"
        if not isinstance(ax, dict) or set(ax) != {"name", "start", "stop", "count"}:
            raise v.error(p, "each axis needs exactly name, start, stop, count")
        spec = field_spec(ax["name"]) if isinstance(ax["name"], str) else None
        if spec is None or spec.kind not in ("float", "int"):
            raise v.error(f"{p}.name", f"{ax['name']!r} is not a numeric config field")
        start = v.value(f"{p}.start", F(0.0), ax["start"])
        stop = v.value(f"{p}.stop", F(0.0), ax["stop"])
        count = v.value(f"{p}.count", I(1, "pos"), ax["count"])
        out.append({"name": ax["name"], "start": start, "stop": stop, "count": count})
    return out


def loads(text):
    """Parse YAML text into a validated config."""
    try:
        node = yaml.compose(text, Loader=_Loader)
        raw = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark
        raise ConfigError("(syntax)", str(exc.problem), m.line + 1 if m else None, m.column + 1 if m else None)
    if raw is None:
        raw = {}
    return validate(raw, _marks(node) if node is not None else {})


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(cfg):
    return yaml.safe_dump(cfg, sort_keys=True, default_flow_style=False)


def set_path(cfg, path, value):
    """Copy of ``cfg`` with one dotted field replaced (cast to its kind)."""
    out = copy.deepcopy(cfg)
    block, _, key = path.partition(".")
    spec = field_spec(path)
    out[block][key] = int(round(value)) if spec.kind == "int" else float(value)
    return out


def config_hash(cfg):
    """sha256 of the physics content (seed, output and format excluded)."""
    body = {k: v for k, v in cfg.items() if k not in ("seed", "output", "format")}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
