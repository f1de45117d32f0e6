"""Grid sweeps over model parameters, time and channel strength.

A :class:`SweepSpec` names one or two axes, a dynamics and the measures to
evaluate. :func:`run_sweep` walks the grid in row-major order (first axis
outermost); each point builds the thermal state, evolves it and evaluates
the measures. Failures are recorded per row in a ``status`` column instead
of aborting the grid.
"""
from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product
from typing import Literal, Sequence

import numpy as np

from . import __version__
from .channels import (
    ChannelFamily,
    apply_channel,
    correlated_dephasing,
    make_channel,
    s_from_time,
    table_elements,
)
from .channels.kraus import canonical_kind
from .core import ModelParams, ThermalElements, thermal_state_closed_form, thermal_state_numeric
from .errors import ComplexEigenvalue, DegenerateNormalizer, DQDError, InvalidParameter, SpecError
from .measures import concurrence_numeric, concurrence_paper, l1_coherence, l1_coherence_paper_eq16

DEFAULT_SEED = 20240601
WORKERS_ENV = "DQDNOISE_WORKERS"

AXIS_NAMES = ("t", "T", "V", "omega_pair", "s")
DYNAMICS_KINDS = ("markovian", "non_markovian", "channel")

# measure name -> CSV column
MEASURE_COLUMNS = {
    "concurrence_numeric": "C",
    "concurrence_paper": "C_paper",
    "l1": "C_l1",
    "l1_paper": "C_l1_paper",
}
MEASURE_LEGEND = {
    "C": "concurrence, Wootters formula on the evolved state",
    "C_paper": "concurrence from the closed-form upsilon/Xi/Lambda/Gamma expressions",
    "C_l1": "l1-norm coherence, sum of |rho_ij| over i != j",
    "C_l1_paper": "closed-form coherence 4(|e12|+|e13|+|e14|+|e23|)",
    "C_l1_minus_C": "C_l1 - C",
    "status": "ok, or the reason a row deviates from the default path",
}


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise SpecError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def format_number(x: float) -> str:
    if x == 0:
        return "0"
    return format(x, ".12g")


@dataclass(frozen=True)
class Axis:
    name: str
    min: float | None = None
    max: float | None = None
    count: int | None = None
    values: tuple[float, ...] | None = None

    def validate(self) -> None:
        if self.name not in AXIS_NAMES:
            raise SpecError(f"axis name {self.name!r} is not one of {AXIS_NAMES}")
        if self.values is not None:
            if len(self.values) < 2:
                raise SpecError(f"axis {self.name}: need at least 2 values")
            if any(not math.isfinite(v) for v in self.values):
                raise SpecError(f"axis {self.name}: values must be finite")
        else:
            if self.min is None or self.max is None or self.count is None:
                raise SpecError(f"axis {self.name}: give either values or all of min, max, count")
            if int(self.count) != self.count or self.count < 2:
                raise SpecError(f"axis {self.name}: count must be an integer >= 2, got {self.count!r}")
            if not self.min < self.max:
                raise SpecError(f"axis {self.name}: need min < max, got {self.min} >= {self.max}")
        lo = float(np.min(self.grid()))
        hi = float(np.max(self.grid()))
        if self.name == "T" and not lo > 0:
            raise SpecError("axis T: temperatures must be > 0")
        if self.name in ("t", "V") and lo < 0:
            raise SpecError(f"axis {self.name}: values must be >= 0")
        if self.name == "s" and (lo < 0 or hi > 1):
            raise SpecError("axis s: values must lie in [0, 1]")

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        return np.linspace(self.min, self.max, int(self.count))

    def describe(self) -> str:
        if self.values is not None:
            return "[" + ",".join(format_number(v) for v in self.values) + "]"
        return f"{format_number(self.min)}:{format_number(self.max)}:{int(self.count)}"


@dataclass(frozen=True)
class Dynamics:
    kind: str
    tau: float | None = None
    mu: float | None = None
    channel: str | None = None
    decay_rate: float | None = None
    time: float = 0.0
    s: float = 0.0
    override_regime: bool = False

    def validate(self) -> None:
        if self.kind not in DYNAMICS_KINDS:
            raise SpecError(f"dynamics kind {self.kind!r} is not one of {DYNAMICS_KINDS}")
        if self.kind == "channel":
            if self.channel is None:
                raise SpecError("channel dynamics needs a channel kind")
            try:
                canonical_kind(self.channel)
            except InvalidParameter as exc:
                raise SpecError(str(exc)) from None
            if self.decay_rate is not None and not self.decay_rate > 0:
                raise SpecError("decay_rate must be > 0")
            if not 0 <= self.s <= 1:
                raise SpecError("s must lie in [0, 1]")
            return
        if self.tau is None or self.mu is None:
            raise SpecError(f"{self.kind} dynamics needs tau and mu")
        if not self.tau > 0:
            raise SpecError(f"tau must be > 0, got {self.tau}")
        if not 0 <= self.mu <= 1:
            raise SpecError(f"mu must lie in [0, 1], got {self.mu}")
        if self.time < 0:
            raise SpecError("time must be >= 0")
        if not self.override_regime:
            if self.kind == "markovian" and not 4 * self.tau < 1:
                raise SpecError(f"markovian dynamics requires 4*tau < 1, got 4*tau = {4 * self.tau:g} "
                                "(set override_regime to force)")
            if self.kind == "non_markovian" and not 4 * self.tau > 1:
                raise SpecError(f"non_markovian dynamics requires 4*tau > 1, got 4*tau = {4 * self.tau:g} "
                                "(set override_regime to force)")


@dataclass(frozen=True)
class SweepSpec:
    model: ModelParams
    axes: tuple[Axis, ...]
    dynamics: Dynamics
    measures: tuple[str, ...] = ("concurrence_numeric", "l1")
    mode: Literal["paper", "kraus"] = "paper"
    paper_source: Literal["tables", "state"] = "tables"
    seed: int = DEFAULT_SEED

    def validate(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise SpecError(f"need 1 or 2 swept axes, got {len(self.axes)}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate axis names {names}")
        for a in self.axes:
            a.validate()
        self.dynamics.validate()
        if "s" in names and self.dynamics.kind != "channel":
            raise SpecError("axis s only applies to channel dynamics")
        if "t" in names and self.dynamics.kind == "channel" and self.dynamics.decay_rate is None:
            raise SpecError("axis t with channel dynamics needs decay_rate (s = 1 - exp(-decay_rate t))")
        if "t" in names and "s" in names:
            raise SpecError("axes t and s cannot be swept together")
        if not self.measures:
            raise SpecError("no measures requested")
        for m in self.measures:
            if m not in MEASURE_COLUMNS:
                raise SpecError(f"unknown measure {m!r}; expected one of {tuple(MEASURE_COLUMNS)}")
        if len(set(self.measures)) != len(self.measures):
            raise SpecError("duplicate measures")
        if self.mode not in ("paper", "kraus"):
            raise SpecError(f"mode must be 'paper' or 'kraus', got {self.mode!r}")
        if self.paper_source not in ("tables", "state"):
            raise SpecError(f"paper_source must be 'tables' or 'state', got {self.paper_source!r}")

    def header(self) -> dict[str, str]:
        m, d = self.model, self.dynamics
        h = {
            "code_version": __version__,
            "seed": str(self.seed),
            "omega1": format_number(m.omega1),
            "omega2": format_number(m.omega2),
            "coulomb": format_number(m.coulomb),
            "temperature": format_number(m.temperature),
            "dynamics": d.kind,
        }
        if d.kind == "channel":
            h["channel"] = canonical_kind(d.channel)
            if d.decay_rate is not None:
                h["decay_rate"] = format_number(d.decay_rate)
            h["paper_source"] = self.paper_source
        else:
            h["tau"] = format_number(d.tau)
            h["mu"] = format_number(d.mu)
            h["mode"] = self.mode
        swept = {"T": ("temperature",), "V": ("coulomb",), "omega_pair": ("omega1", "omega2")}
        for a in self.axes:
            for key in swept.get(a.name, ()):
                h[key] = f"swept(axis.{a.name})"
            h[f"axis.{a.name}"] = a.describe()
        h["measures"] = ",".join(self.measures)
        return h


@dataclass
class SweepResult:
    header: dict[str, str]
    columns: list[str]
    rows: list[list]
    legend: dict[str, str] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([np.nan if r[j] is None else r[j] for r in self.rows], dtype=float)

    def statuses(self) -> list[str]:
        if "status" not in self.columns:
            return ["ok"] * len(self.rows)
        j = self.columns.index("status")
        return [r[j] for r in self.rows]

    def write_csv(self, fh) -> None:
        for k, v in self.header.items():
            fh.write(f"# {k}={v}\n")
        for col in self.columns:
            if col in self.legend:
                fh.write(f"# column.{col}={self.legend[col]}\n")
        fh.write(",".join(self.columns) + "\n")
        for row in self.rows:
            cells = []
            for v in row:
                if v is None:
                    cells.append("")
                elif isinstance(v, str):
                    cells.append(v)
                else:
                    cells.append(format_number(float(v)))
            fh.write(",".join(cells) + "\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def save(self, path) -> None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            self.write_csv(fh)


def _point_params(model: ModelParams, coords: dict) -> ModelParams:
    changes = {}
    if "T" in coords:
        changes["temperature"] = coords["T"]
    if "V" in coords:
        changes["coulomb"] = coords["V"]
    if "omega_pair" in coords:
        changes["omega1"] = changes["omega2"] = coords["omega_pair"]
    return model.replace(**changes) if changes else model


@lru_cache(maxsize=1024)
def _initial_state(params: ModelParams) -> tuple[np.ndarray, bool]:
    try:
        rho, fallback = thermal_state_closed_form(params), False
    except DegenerateNormalizer:
        rho, fallback = thermal_state_numeric(params), True
    rho.setflags(write=False)
    return rho, fallback


def evaluate_point(spec: SweepSpec, coords: dict) -> tuple[list, str]:
    """Measures at one grid point and its status string."""
    flags = []
    try:
        params = _point_params(spec.model, coords)
        rho0, fallback = _initial_state(params)
        if fallback:
            flags.append("numeric_fallback")
        el0 = ThermalElements.from_matrix(rho0)
        dyn = spec.dynamics

        if dyn.kind == "channel":
            if "s" in coords:
                s = coords["s"]
            elif "t" in coords:
                s = s_from_time(coords["t"], dyn.decay_rate)
            else:
                s = dyn.s
            kind = canonical_kind(dyn.channel)
            rho = apply_channel(rho0, make_channel(ChannelFamily(kind, s)))
            if spec.paper_source == "tables":
                el = table_elements(el0, kind, s)
            else:
                el = ThermalElements.from_matrix(rho)
        else:
            t = coords.get("t", dyn.time)
            d_mode = "paper_uniform_gamma" if spec.mode == "paper" else "kraus_exact"
            rho = correlated_dephasing(rho0, t, dyn.tau, dyn.mu, mode=d_mode)
            el = ThermalElements.from_matrix(rho)

        values = []
        for m in spec.measures:
            if m == "concurrence_numeric":
                values.append(concurrence_numeric(rho).value)
            elif m == "l1":
                values.append(l1_coherence(rho).value)
            elif m == "l1_paper":
                values.append(l1_coherence_paper_eq16(el).value)
            elif m == "concurrence_paper":
                try:
                    values.append(concurrence_paper(el).value)
                except ComplexEigenvalue:
                    values.append(None)
                    flags.append("paper_undefined")
    except DQDError as exc:
        return [None] * len(spec.measures), f"error:{type(exc).__name__}"
    return values, "+".join(flags) if flags else "ok"


def _grid_points(spec: SweepSpec) -> list[tuple[float, ...]]:
    grids = [a.grid() for a in spec.axes]
    return [tuple(float(x) for x in p) for p in product(*grids)]


def _evaluate_chunk(args):
    spec, points = args
    names = [a.name for a in spec.axes]
    return [evaluate_point(spec, dict(zip(names, p))) for p in points]


def _split(seq: Sequence, parts: int) -> list[Sequence]:
    n = len(seq)
    bounds = [round(i * n / parts) for i in range(parts + 1)]
    return [seq[bounds[i]:bounds[i + 1]] for i in range(parts) if bounds[i] < bounds[i + 1]]


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate ``spec`` on its grid; row order never depends on ``workers``."""
    spec.validate()
    workers = default_workers() if workers is None else max(1, int(workers))
    points = _grid_points(spec)

    if workers > 1 and len(points) > 1:
        chunks = _split(points, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            evaluated = [r for part in pool.map(_evaluate_chunk, [(spec, c) for c in chunks]) for r in part]
    else:
        evaluated = _evaluate_chunk((spec, points))

    measure_cols = [MEASURE_COLUMNS[m] for m in spec.measures]
    columns = [a.name for a in spec.axes] + measure_cols + ["status"]
    rows = [list(p) + vals + [status] for p, (vals, status) in zip(points, evaluated)]
    legend = {c: MEASURE_LEGEND[c] for c in measure_cols + ["status"]}
    return SweepResult(header=spec.header(), columns=columns, rows=rows, legend=legend)


def compare_measures(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run ``spec`` with both C and C_l1 and append a ``C_l1_minus_C`` column."""
    measures = tuple(spec.measures)
    for m in ("l1", "concurrence_numeric"):
        if m not in measures:
            measures = (m,) + measures
    res = run_sweep(replace(spec, measures=measures), workers)
    c = res.columns.index("C")
    q = res.columns.index("C_l1")
    for row in res.rows:
        row.insert(-1, None if row[c] is None or row[q] is None else row[q] - row[c])
    res.columns.insert(-1, "C_l1_minus_C")
    res.legend["C_l1_minus_C"] = MEASURE_LEGEND["C_l1_minus_C"]
    return res
