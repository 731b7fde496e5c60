"""Scenario configuration files (TOML, schema version 1).

A config has top-level keys ``schema_version``, ``name``, ``kind``,
optional ``seed``, ``output`` and ``description``, plus two tables:
``[system]`` (the physical setup) and ``[numerics]`` (discretization and
tolerances).  Which keys each table accepts depends on ``kind``; unknown
keys are rejected.  Angles and spins may be written as numbers or as
short arithmetic strings such as ``"pi/3"`` or ``"3/2"``.
"""

import ast
import math
import operator
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError

SCHEMA_VERSION = 1
MAX_SPIN = 4.0

KINDS = (
    "berry-cone",
    "berry-custom-loop",
    "aa-precession",
    "aa-vs-berry-sweep",
    "wz-quadrupole",
    "pancharatnam-chain",
)

_TOP_KEYS = {"schema_version", "name", "kind", "seed", "output", "description", "system", "numerics"}

# expression strings: numbers, pi, + - * / and parentheses
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_expr(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    raise ValueError("unsupported expression")


def parse_number(value):
    """Float from a TOML number or an arithmetic string like "2*pi/3"."""
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            out = _eval_expr(ast.parse(value.strip(), mode="eval"))
        except (SyntaxError, ValueError, ZeroDivisionError):
            raise ValueError(f"cannot evaluate {value!r}") from None
        if not math.isfinite(out):
            raise ValueError(f"{value!r} is not finite")
        return out
    raise ValueError(f"expected a number, got {type(value).__name__}")


class _Checker:
    """Collects validation errors for one table instead of stopping at the first."""

    def __init__(self, table, where, errors):
        self.table = dict(table)
        self.where = where
        self.errors = errors
        self.used = set()

    def _err(self, key, msg):
        self.errors.append(f"{self.where}.{key}: {msg}")

    def get(self, key, conv, default=None, required=False):
        self.used.add(key)
        if key not in self.table:
            if required:
                self._err(key, "is required")
            return default
        try:
            return conv(self.table[key])
        except (ValueError, TypeError) as exc:
            self._err(key, str(exc))
            return default

    def finish(self):
        for key in sorted(set(self.table) - self.used):
            self._err(key, "unknown key")


def _int(lo=None):
    def conv(v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValueError("expected an integer")
        if lo is not None and v < lo:
            raise ValueError(f"must be >= {lo}, got {v}")
        return int(v)

    return conv


def _positive(v):
    x = parse_number(v)
    if not x > 0:
        raise ValueError(f"must be positive, got {x}")
    return x


def _nonzero(v):
    x = parse_number(v)
    if x == 0:
        raise ValueError("must be nonzero")
    return x


def _angle(v):
    x = parse_number(v)
    if not 0.0 <= x <= math.pi + 1e-12:
        raise ValueError(f"colatitude must lie in [0, pi], got {x}")
    return x


def _spin(v):
    s = parse_number(v)
    if abs(2 * s - round(2 * s)) > 1e-12 or s < 0.5 or s > MAX_SPIN:
        raise ValueError(f"spin must be a half-integer in [1/2, {MAX_SPIN:g}], got {s}")
    return round(2 * s) / 2.0


def _half_integer(v):
    m = parse_number(v)
    if abs(2 * m - round(2 * m)) > 1e-12:
        raise ValueError(f"magnetic quantum number must be a half-integer, got {m}")
    return round(2 * m) / 2.0


def _list_of(conv, min_len=1, allow_scalar=False):
    def inner(v):
        if allow_scalar and not isinstance(v, list):
            v = [v]
        if not isinstance(v, list):
            raise ValueError("expected a list")
        if len(v) < min_len:
            raise ValueError(f"needs at least {min_len} entries")
        return [conv(x) for x in v]

    return inner


def _vector3(v):
    if not isinstance(v, list) or len(v) != 3:
        raise ValueError("expected a 3-vector")
    out = [parse_number(x) for x in v]
    if math.hypot(*out) == 0.0:
        raise ValueError("zero vector")
    return out


def _choice(*options):
    def conv(v):
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}; got {v!r}")
        return v

    return conv


def _polarization(v):
    # a name such as "H", a Stokes 3-vector, or a spinor [[re, im], [re, im]]
    if isinstance(v, str):
        if v.upper() not in ("H", "V", "D", "A", "R", "L"):
            raise ValueError(f"unknown polarization name {v!r}")
        return v.upper()
    if isinstance(v, list) and len(v) == 2 and all(isinstance(c, list) and len(c) == 2 for c in v):
        return [[parse_number(c[0]), parse_number(c[1])] for c in v]
    if isinstance(v, list) and len(v) == 3:
        return _vector3(v)
    raise ValueError("polarization must be a name, a Stokes 3-vector or [[re, im], [re, im]]")


def _validate_berry_cone(sy, nu, errors):
    system = {
        "spin": sy.get("spin", _list_of(_spin, allow_scalar=True), [0.5]),
        "coupling": sy.get("coupling", _nonzero, 1.0),
        "theta": sy.get("theta", _list_of(_angle, allow_scalar=True), required=True),
        "levels": sy.get("levels", _list_of(_half_integer), None),
    }
    numerics = {
        "samples": nu.get("samples", _int(3), 720),
        "method": nu.get("method", _choice("discrete", "connection", "adiabatic"), "discrete"),
        "sweep_times": nu.get("sweep_times", _list_of(_positive), None),
        "steps_per_time": nu.get("steps_per_time", _positive, 100.0),
        "leakage_tol": nu.get("leakage_tol", _positive, 0.05),
        "tolerance": nu.get("tolerance", _positive, 1e-3),
        "monotone_slack": nu.get("monotone_slack", _positive, 0.0),
    }
    if numerics["method"] == "adiabatic" and not numerics["sweep_times"]:
        errors.append("numerics.sweep_times: is required for method 'adiabatic'")
    if numerics["method"] != "adiabatic" and numerics["sweep_times"]:
        errors.append("numerics.sweep_times: only used with method 'adiabatic'")
    _check_levels(system, errors)
    return system, numerics


def _check_levels(system, errors):
    if system.get("levels") and system.get("spin"):
        for s in system["spin"]:
            for m in system["levels"]:
                if abs(m) > s or abs((s - m) - round(s - m)) > 1e-12:
                    errors.append(f"system.levels: m={m:g} is not a level of spin {s:g}")


def _validate_custom_loop(sy, nu, errors):
    system = {
        "spin": sy.get("spin", _list_of(_spin, allow_scalar=True), [0.5]),
        "coupling": sy.get("coupling", _nonzero, 1.0),
        "vertices": sy.get("vertices", _list_of(_vector3, min_len=3), required=True),
        "levels": sy.get("levels", _list_of(_half_integer), None),
    }
    numerics = {
        "samples": nu.get("samples", _int(3), 720),
        "method": nu.get("method", _choice("discrete", "connection"), "discrete"),
        "tolerance": nu.get("tolerance", _positive, 1e-3),
    }
    _check_levels(system, errors)
    return system, numerics


def _validate_precession(sy, nu, errors):
    system = {
        "spin": sy.get("spin", _list_of(_spin, allow_scalar=True), [0.5]),
        "coupling": sy.get("coupling", _nonzero, 1.0),
        "field_strength": sy.get("field_strength", _positive, 1.0),
        "theta": sy.get("theta", _list_of(_angle, allow_scalar=True), required=True),
    }
    numerics = {
        "steps": nu.get("steps", _int(1), 10000),
        "periods": nu.get("periods", _int(1), 1),
        "cyclicity_tol": nu.get("cyclicity_tol", _positive, 1e-6),
        "tolerance": nu.get("tolerance", _positive, 1e-4),
    }
    return system, numerics


def _validate_sweep(sy, nu, errors):
    system = {
        "spin": sy.get("spin", _spin, 0.5),
        "coupling": sy.get("coupling", _nonzero, 1.0),
        "theta": sy.get("theta", _angle, required=True),
        "level": sy.get("level", _half_integer, None),
    }
    numerics = {
        "samples": nu.get("samples", _int(3), 720),
        "sweep_times": nu.get("sweep_times", _list_of(_positive), required=True),
        "steps_per_time": nu.get("steps_per_time", _positive, 100.0),
        "cyclicity_tol": nu.get("cyclicity_tol", _positive, 1e-2),
        "tolerance": nu.get("tolerance", _positive, 1e-2),
        "monotone_slack": nu.get("monotone_slack", _positive, 0.1),
    }
    if system["spin"] is not None and system["level"] is None:
        system["level"] = system["spin"]
    if system["spin"] is not None and system["level"] is not None:
        s, m = system["spin"], system["level"]
        if abs(m) > s or abs((s - m) - round(s - m)) > 1e-12:
            errors.append(f"system.level: m={m:g} is not a level of spin {s:g}")
    return system, numerics


def _validate_wz(sy, nu, errors):
    system = {
        "spin": sy.get("spin", _spin, 1.5),
        "coupling": sy.get("coupling", _nonzero, 1.0),
        "theta": sy.get("theta", _angle, required=True),
        "block": sy.get("block", _int(0), 0),
    }
    numerics = {
        "samples": nu.get("samples", _int(3), 720),
        "sweep_times": nu.get("sweep_times", _list_of(_positive), []),
        "steps_per_time": nu.get("steps_per_time", _positive, 100.0),
        "leakage_tol": nu.get("leakage_tol", _positive, 0.05),
        "tolerance": nu.get("tolerance", _positive, 5e-2),
        "monotone_slack": nu.get("monotone_slack", _positive, 0.0),
    }
    if system["spin"] is not None and system["spin"] == round(system["spin"]):
        errors.append("system.spin: the quadrupole family needs a half-integer spin for Kramers pairs")
    return system, numerics


def _validate_chain(sy, nu, errors):
    system = {
        "vertices": sy.get("vertices", _list_of(_polarization, min_len=1), None),
        "random_chains": sy.get("random_chains", _int(0), 0),
        "min_vertices": sy.get("min_vertices", _int(3), 3),
        "max_vertices": sy.get("max_vertices", _int(3), 6),
    }
    numerics = {"tolerance": nu.get("tolerance", _positive, 1e-9)}
    if not system["vertices"] and not system["random_chains"]:
        errors.append("system.vertices: give vertices or a positive random_chains count")
    if (system["min_vertices"] or 3) > (system["max_vertices"] or 6):
        errors.append("system.max_vertices: must be >= min_vertices")
    return system, numerics


_VALIDATORS = {
    "berry-cone": _validate_berry_cone,
    "berry-custom-loop": _validate_custom_loop,
    "aa-precession": _validate_precession,
    "aa-vs-berry-sweep": _validate_sweep,
    "wz-quadrupole": _validate_wz,
    "pancharatnam-chain": _validate_chain,
}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    kind: str
    system: dict
    numerics: dict
    seed: int = 0
    output: Optional[str] = None
    description: str = ""
    schema_version: int = SCHEMA_VERSION
    source: Optional[str] = field(default=None, compare=False)

    def with_seed(self, seed):
        return replace(self, seed=int(seed))

    def echo(self):
        """Plain-data view of the validated config, as stored in reports."""
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "kind": self.kind,
            "seed": self.seed,
            "system": self.system,
            "numerics": self.numerics,
        }


def parse_config(text, source=None):
    """Parse and validate a TOML scenario document.

    Raises ConfigError listing every problem found; syntax errors carry
    the line and column reported by the TOML parser.
    """
    where = source or "<config>"
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{where}: parse error: {exc}"]) from None
    errors = []
    top = _Checker(doc, "config", errors)
    version = top.get("schema_version", _int(), required=True)
    if version is not None and version != SCHEMA_VERSION:
        errors.append(f"config.schema_version: unsupported version {version} (expected {SCHEMA_VERSION})")
    name = top.get("name", _nonempty_str, required=True)
    kind = top.get("kind", _choice(*KINDS), required=True)
    seed = top.get("seed", _int(0), 0)
    output = top.get("output", _nonempty_str, None)
    description = top.get("description", str, "")
    sys_table = top.get("system", _table, {})
    num_table = top.get("numerics", _table, {})
    top.finish()
    system, numerics = {}, {}
    if kind in _VALIDATORS:
        sy = _Checker(sys_table or {}, "system", errors)
        nu = _Checker(num_table or {}, "numerics", errors)
        system, numerics = _VALIDATORS[kind](sy, nu, errors)
        sy.finish()
        nu.finish()
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(name, kind, system, numerics, seed, output, description, version, source)


def _nonempty_str(v):
    if not isinstance(v, str) or not v.strip():
        raise ValueError("expected a non-empty string")
    return v


def _table(v):
    if not isinstance(v, dict):
        raise ValueError("expected a table")
    return v


def load_config(path):
    """Read and validate a config file; OSError propagates to the caller."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, source=str(path))
