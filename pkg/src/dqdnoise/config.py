"""TOML sweep configuration.

Example::

    [model]
    omega1 = 10
    omega2 = 15
    coulomb = 25
    temperature = 0.1

    [dynamics]
    kind = "markovian"          # markovian | non_markovian | channel
    tau = 0.2
    mu = 0.3

    [[axes]]
    name = "t"                  # t | T | V | omega_pair | s
    min = 0
    max = 40
    count = 201

    [[axes]]
    name = "T"
    values = [1e-6, 5, 14, 20]

    [output]
    measures = ["concurrence_numeric", "l1"]
    mode = "paper"              # paper | kraus
    seed = 20240601

Model fields driven by a swept axis may be omitted (``temperature`` when
``T`` is swept, ``coulomb`` for ``V``, ``omega1``/``omega2`` for
``omega_pair``).
"""
from __future__ import annotations

import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import ModelParams
from .errors import InvalidParameter, ParseError
from .sweep import DEFAULT_SEED, Axis, Dynamics, SweepSpec

_MODEL_FIELDS = ("omega1", "omega2", "coulomb", "temperature")
_AXIS_DRIVES = {"T": ("temperature",), "V": ("coulomb",), "omega_pair": ("omega1", "omega2")}
_DYNAMICS_FIELDS = {"kind", "tau", "mu", "channel", "decay_rate", "time", "s", "override_regime"}
_AXIS_FIELDS = {"name", "min", "max", "count", "values"}
_OUTPUT_FIELDS = {"measures", "mode", "paper_source", "seed"}
# Placeholder for model fields that every grid point overrides.
_PLACEHOLDER = {"omega1": 0.0, "omega2": 0.0, "coulomb": 0.0, "temperature": 1.0}


def _number(table: dict, key: str, where: str, required: bool = True, default=None):
    if key not in table:
        if required:
            raise ParseError(f"{where}.{key}: missing required field")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}.{key}: expected a number, got {type(v).__name__}")
    if isinstance(v, float) and not math.isfinite(v) and key != "temperature":
        raise ParseError(f"{where}.{key}: must be finite")
    return v


def _string(table: dict, key: str, where: str, required: bool = True, default=None):
    if key not in table:
        if required:
            raise ParseError(f"{where}.{key}: missing required field")
        return default
    v = table[key]
    if not isinstance(v, str):
        raise ParseError(f"{where}.{key}: expected a string, got {type(v).__name__}")
    return v


def _table(doc: dict, key: str, required: bool = True) -> dict:
    if key not in doc:
        if required:
            raise ParseError(f"[{key}]: missing required table")
        return {}
    if not isinstance(doc[key], dict):
        raise ParseError(f"[{key}]: expected a table")
    return doc[key]


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    extra = sorted(set(table) - allowed)
    if extra:
        raise ParseError(f"{where}: unknown field(s) {', '.join(extra)}")


def _parse_axes(doc: dict) -> tuple[Axis, ...]:
    raw = doc.get("axes")
    if raw is None:
        raise ParseError("[[axes]]: missing required array of tables")
    if not isinstance(raw, list) or not all(isinstance(a, dict) for a in raw):
        raise ParseError("[[axes]]: expected an array of tables")
    axes = []
    for i, a in enumerate(raw):
        where = f"axes[{i}]"
        _reject_unknown(a, _AXIS_FIELDS, where)
        name = _string(a, "name", where)
        if "values" in a:
            vals = a["values"]
            if not isinstance(vals, list) or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                raise ParseError(f"{where}.values: expected an array of numbers")
            for k in ("min", "max", "count"):
                if k in a:
                    raise ParseError(f"{where}.{k}: not allowed together with values")
            axes.append(Axis(name, values=tuple(float(v) for v in vals)))
        else:
            lo = _number(a, "min", where)
            hi = _number(a, "max", where)
            count = a.get("count")
            if count is None:
                raise ParseError(f"{where}.count: missing required field")
            if isinstance(count, bool) or not isinstance(count, int):
                raise ParseError(f"{where}.count: expected an integer")
            axes.append(Axis(name, float(lo), float(hi), count))
    return tuple(axes)


def parse_sweep_config(doc: dict) -> SweepSpec:
    """Build a :class:`SweepSpec` from a decoded TOML document.

    Raises :class:`ParseError` for structural problems; invariant checks
    (regime rule, ranges) are left to ``SweepSpec.validate``.
    """
    _reject_unknown(doc, {"model", "dynamics", "axes", "output"}, "top level")
    axes = _parse_axes(doc)
    driven = {f for a in axes for f in _AXIS_DRIVES.get(a.name, ())}

    model_t = _table(doc, "model")
    _reject_unknown(model_t, set(_MODEL_FIELDS), "model")
    fields = {}
    for key in _MODEL_FIELDS:
        v = _number(model_t, key, "model", required=key not in driven, default=_PLACEHOLDER[key])
        fields[key] = float(v)
    try:
        model = ModelParams(**fields)
    except InvalidParameter as exc:
        raise ParseError(f"model: {exc}") from None

    dyn_t = _table(doc, "dynamics")
    _reject_unknown(dyn_t, _DYNAMICS_FIELDS, "dynamics")
    override = dyn_t.get("override_regime", False)
    if not isinstance(override, bool):
        raise ParseError("dynamics.override_regime: expected a boolean")
    dynamics = Dynamics(
        kind=_string(dyn_t, "kind", "dynamics"),
        tau=_number(dyn_t, "tau", "dynamics", required=False),
        mu=_number(dyn_t, "mu", "dynamics", required=False),
        channel=_string(dyn_t, "channel", "dynamics", required=False),
        decay_rate=_number(dyn_t, "decay_rate", "dynamics", required=False),
        time=float(_number(dyn_t, "time", "dynamics", required=False, default=0.0)),
        s=float(_number(dyn_t, "s", "dynamics", required=False, default=0.0)),
        override_regime=override,
    )

    out_t = _table(doc, "output", required=False)
    _reject_unknown(out_t, _OUTPUT_FIELDS, "output")
    measures = out_t.get("measures", ["concurrence_numeric", "l1"])
    if not isinstance(measures, list) or not all(isinstance(m, str) for m in measures):
        raise ParseError("output.measures: expected an array of strings")
    seed = out_t.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ParseError("output.seed: expected an integer")
    return SweepSpec(
        model=model, axes=axes, dynamics=dynamics, measures=tuple(measures),
        mode=_string(out_t, "mode", "output", required=False, default="paper"),
        paper_source=_string(out_t, "paper_source", "output", required=False, default="tables"),
        seed=seed,
    )


def load_sweep_config(path) -> SweepSpec:
    """Read and parse a TOML sweep config. ``OSError`` propagates unchanged."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    try:
        return parse_sweep_config(doc)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
