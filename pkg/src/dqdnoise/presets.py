"""Named sweep presets for each figure panel.

Line-family panels (``fig1``-``fig4``) sweep time and pivot a second,
discrete parameter into columns such as ``C(T=1e-6)``. Surface panels
(``fig6``-``fig11``) emit long format ``s, <param>, <measure>``. Comparison
panels (``fig5``, ``fig12``) emit ``C``, ``C_l1`` and their difference.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .core import ModelParams
from .errors import UnknownPreset
from .sweep import (
    DEFAULT_SEED,
    MEASURE_COLUMNS,
    MEASURE_LEGEND,
    Axis,
    Dynamics,
    SweepResult,
    SweepSpec,
    compare_measures,
    run_sweep,
)

# Grid resolution: 201 points for 1-D curves, 101 x 101 for surfaces.
LINE_POINTS = 201
SURFACE_POINTS = 101
T_MAX = 40.0

MARKOVIAN = Dynamics("markovian", tau=0.2, mu=0.3)
NON_MARKOVIAN = Dynamics("non_markovian", tau=5.0, mu=0.3)

# Curve values for the line-family panels.
TEMPERATURES = (1e-6, 5.0, 14.0, 20.0)
COULOMBS = (5.0, 15.0, 25.0, 40.0)
OMEGA_PAIRS = (5.0, 10.0, 15.0, 20.0)

_PARAM_KEYS = {"a": "T", "b": "V", "c": "omega_pair"}


@dataclass(frozen=True)
class Panel:
    id: str
    description: str
    spec: SweepSpec
    curve_axis: str | None = None
    compare: bool = False


def _model(panel_letter: str) -> ModelParams:
    if panel_letter == "a":
        return ModelParams(10.0, 15.0, 25.0, 0.1)
    if panel_letter == "b":
        return ModelParams(10.0, 15.0, 25.0, 0.1)
    return ModelParams(10.0, 10.0, 40.0, 0.1)


def _curve_axis(letter: str) -> Axis:
    values = {"a": TEMPERATURES, "b": COULOMBS, "c": OMEGA_PAIRS}[letter]
    return Axis(_PARAM_KEYS[letter], values=values)


def _surface_axis(letter: str) -> Axis:
    if letter == "a":
        return Axis("T", 0.01, 20.0, SURFACE_POINTS)
    if letter == "b":
        return Axis("V", 0.0, 40.0, SURFACE_POINTS)
    return Axis("omega_pair", 0.0, 20.0, SURFACE_POINTS)


def _build() -> dict[str, Panel]:
    panels: dict[str, Panel] = {}
    t_axis = Axis("t", 0.0, T_MAX, LINE_POINTS)
    lines = {
        "fig1": (MARKOVIAN, "concurrence_numeric", "concurrence, Markovian dephasing"),
        "fig2": (NON_MARKOVIAN, "concurrence_numeric", "concurrence, non-Markovian dephasing"),
        "fig3": (MARKOVIAN, "l1", "l1 coherence, Markovian dephasing"),
        "fig4": (NON_MARKOVIAN, "l1", "l1 coherence, non-Markovian dephasing"),
    }
    for fig, (dyn, measure, desc) in lines.items():
        for letter in "abc":
            pid = f"{fig}{letter}"
            spec = SweepSpec(_model(letter), (t_axis, _curve_axis(letter)), dyn, (measure,))
            panels[pid] = Panel(pid, f"{desc} vs t for several {_PARAM_KEYS[letter]}", spec,
                                curve_axis=_PARAM_KEYS[letter])

    fig5_model = ModelParams(10.0, 15.0, 15.0, 0.01)
    for letter, dyn, desc in (("a", MARKOVIAN, "Markovian"), ("b", NON_MARKOVIAN, "non-Markovian")):
        spec = SweepSpec(fig5_model, (t_axis,), dyn, ("concurrence_numeric", "l1"))
        panels[f"fig5{letter}"] = Panel(f"fig5{letter}", f"C versus C_l1, {desc} dephasing",
                                        spec, compare=True)

    surfaces = {
        "fig6": ("amplitude_damping", "concurrence_numeric"),
        "fig7": ("phase_flip", "concurrence_numeric"),
        "fig8": ("phase_damping", "concurrence_numeric"),
        "fig9": ("amplitude_damping", "l1"),
        "fig10": ("phase_flip", "l1"),
        "fig11": ("phase_damping", "l1"),
    }
    s_axis = Axis("s", 0.0, 1.0, SURFACE_POINTS)
    for fig, (channel, measure) in surfaces.items():
        for letter in "abc":
            pid = f"{fig}{letter}"
            spec = SweepSpec(_model(letter), (s_axis, _surface_axis(letter)),
                             Dynamics("channel", channel=channel), (measure,))
            panels[pid] = Panel(pid, f"{MEASURE_COLUMNS[measure]} under {channel} over s and "
                                f"{_PARAM_KEYS[letter]}", spec)

    s_line = Axis("s", 0.0, 1.0, LINE_POINTS)
    for letter, channel in zip("abc", ("amplitude_damping", "phase_flip", "phase_damping")):
        spec = SweepSpec(ModelParams(10.0, 15.0, 25.0, 0.1), (s_line,),
                         Dynamics("channel", channel=channel), ("concurrence_numeric", "l1"))
        panels[f"fig12{letter}"] = Panel(f"fig12{letter}", f"C versus C_l1 under {channel}",
                                         spec, compare=True)
    return panels


PANELS: dict[str, Panel] = _build()
FIGURES = tuple(f"fig{i}" for i in range(1, 13))


def resolve(preset_id: str) -> list[Panel]:
    """Panels for a figure id (``fig7``) or a single panel id (``fig7b``)."""
    key = preset_id.strip().lower()
    if key in PANELS:
        return [PANELS[key]]
    if key in FIGURES:
        return [p for pid, p in PANELS.items() if re.fullmatch(rf"{key}[a-c]", pid)]
    raise UnknownPreset(f"unknown preset {preset_id!r}; known: {', '.join(FIGURES)} "
                        "and their panels (e.g. fig2a)")


def curve_label(value: float) -> str:
    """Compact label: ``1e-6``, ``5``, ``0.25``."""
    text = f"{value:g}"
    return re.sub(r"e([+-])0*(\d)", lambda m: "e" + ("-" if m.group(1) == "-" else "") + m.group(2), text)


def _pivot(res: SweepResult, curve_axis: str) -> SweepResult:
    x_name = next(c for c in res.columns if c not in (curve_axis, "status")
                  and c not in MEASURE_COLUMNS.values())
    xi = res.columns.index(x_name)
    ci = res.columns.index(curve_axis)
    measure_cols = [c for c in res.columns if c in MEASURE_COLUMNS.values()]
    curve_values = []
    for r in res.rows:
        if r[ci] not in curve_values:
            curve_values.append(r[ci])
    columns = [x_name] + [f"{m}({curve_axis}={curve_label(v)})" for m in measure_cols for v in curve_values]
    legend = {}
    for m in measure_cols:
        for v in curve_values:
            legend[f"{m}({curve_axis}={curve_label(v)})"] = f"{MEASURE_LEGEND[m]}, {curve_axis}={curve_label(v)}"

    by_x: dict[float, dict] = {}
    status_by_x: dict[float, list[str]] = {}
    for r in res.rows:
        cell = by_x.setdefault(r[xi], {})
        for m in measure_cols:
            cell[(m, r[ci])] = r[res.columns.index(m)]
        status_by_x.setdefault(r[xi], [])
        st = r[res.columns.index("status")]
        if st != "ok" and st not in status_by_x[r[xi]]:
            status_by_x[r[xi]].append(st)
    rows = [[x] + [cells[(m, v)] for m in measure_cols for v in curve_values] for x, cells in by_x.items()]
    out = SweepResult(header=dict(res.header), columns=columns, rows=rows, legend=legend)
    if any(status_by_x.values()):
        out.columns.append("status")
        out.legend["status"] = MEASURE_LEGEND["status"]
        for row, st in zip(out.rows, status_by_x.values()):
            row.append("+".join(st) if st else "ok")
    return out


def _drop_clean_status(res: SweepResult) -> SweepResult:
    if "status" in res.columns and all(s == "ok" for s in res.statuses()):
        j = res.columns.index("status")
        res.columns.pop(j)
        for r in res.rows:
            r.pop(j)
        res.legend.pop("status", None)
    return res


def render_panel(panel: Panel, *, mode: str = "paper", measures=None, workers=None,
                 seed: int = DEFAULT_SEED) -> SweepResult:
    """Run a panel and shape its table for CSV output."""
    spec = replace(panel.spec, mode=mode, seed=seed)
    if measures:
        spec = replace(spec, measures=tuple(measures))
    res = compare_measures(spec, workers) if panel.compare else run_sweep(spec, workers)
    res.header = {"preset": panel.id, "description": panel.description, **res.header}
    if panel.curve_axis:
        return _pivot(res, panel.curve_axis)
    return _drop_clean_status(res)
