"""Kraus channels on two qubits and the product AD / PF / PD families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal, Sequence

import numpy as np

from ..core import ThermalElements
from ..errors import InvalidParameter, NotCPTP
from ..states import state_defects, validate_density_matrix

CPTP_TOL = 1e-12

ChannelKind = Literal["amplitude_damping", "phase_flip", "phase_damping"]
CHANNEL_KINDS: tuple[str, ...] = ("amplitude_damping", "phase_flip", "phase_damping")
_ALIASES = {"ad": "amplitude_damping", "pf": "phase_flip", "pd": "phase_damping"}


def canonical_kind(kind: str) -> str:
    k = _ALIASES.get(kind.lower(), kind.lower())
    if k not in CHANNEL_KINDS:
        raise InvalidParameter(f"unknown channel kind {kind!r}; expected one of {CHANNEL_KINDS}")
    return k


@dataclass(frozen=True)
class TwoQubitChannel:
    kraus_ops: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        for k in ops:
            if k.shape != (4, 4):
                raise InvalidParameter(f"Kraus operator has shape {k.shape}, expected (4, 4)")
        object.__setattr__(self, "kraus_ops", ops)

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus_ops)

    @cached_property
    def _defect(self) -> float:
        k = self.stacked
        total = np.einsum("kji,kjl->il", k.conj(), k)
        return float(np.max(np.abs(total - np.eye(4))))

    def completeness_defect(self) -> float:
        """``max |sum K^dag K - I|`` elementwise."""
        return self._defect

    def is_cptp(self, tol: float = CPTP_TOL) -> bool:
        return self.completeness_defect() <= tol

    def check_cptp(self, tol: float = CPTP_TOL) -> None:
        defect = self.completeness_defect()
        if not defect <= tol:
            raise NotCPTP(f"channel {self.label or '<unnamed>'}: "
                          f"|sum K^dag K - I| = {defect:.3e} > {tol:g}")


def apply_channel(rho, ch: TwoQubitChannel) -> np.ndarray:
    """``sum_k K rho K^dag`` after checking completeness and the input state."""
    ch.check_cptp()
    rho = validate_density_matrix(rho)
    k = ch.stacked
    return np.einsum("kij,jl,kml->im", k, rho, k.conj(), optimize=False)


def identity_channel() -> TwoQubitChannel:
    return TwoQubitChannel((np.eye(4),), label="identity")


def product_channel(single: Sequence[np.ndarray], label: str = "") -> TwoQubitChannel:
    """Same single-qubit Kraus set on both qubits: ``{K_k (x) K_l}``."""
    ops = tuple(np.kron(a, b) for a in single for b in single)
    return TwoQubitChannel(ops, label=label)


def single_qubit_kraus(kind: str, s: float) -> tuple[np.ndarray, np.ndarray]:
    kind = canonical_kind(kind)
    if not 0.0 <= s <= 1.0:
        raise InvalidParameter(f"decoherence parameter s must lie in [0, 1], got {s!r}")
    a, b = math.sqrt(1.0 - s), math.sqrt(s)
    if kind == "amplitude_damping":
        return np.array([[1.0, 0.0], [0.0, a]]), np.array([[0.0, b], [0.0, 0.0]])
    if kind == "phase_flip":
        return np.array([[b, 0.0], [0.0, b]]), np.array([[a, 0.0], [0.0, -a]])
    return np.array([[1.0, 0.0], [0.0, a]]), np.array([[0.0, 0.0], [0.0, b]])


@dataclass(frozen=True)
class ChannelFamily:
    kind: str
    s: float
    decay_rate: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if not 0.0 <= self.s <= 1.0:
            raise InvalidParameter(f"decoherence parameter s must lie in [0, 1], got {self.s!r}")
        if self.decay_rate is not None and not self.decay_rate > 0:
            raise InvalidParameter(f"decay_rate must be > 0, got {self.decay_rate!r}")

    @classmethod
    def from_time(cls, kind: str, t: float, decay_rate: float) -> "ChannelFamily":
        """Family at time ``t`` with ``s = 1 - exp(-decay_rate t)``."""
        return cls(kind, s_from_time(t, decay_rate), decay_rate)


def s_from_time(t, decay_rate: float):
    if not decay_rate > 0:
        raise InvalidParameter(f"decay_rate must be > 0, got {decay_rate!r}")
    out = -np.expm1(-decay_rate * np.asarray(t, dtype=float))
    return float(out) if out.ndim == 0 else out


def make_channel(family: ChannelFamily) -> TwoQubitChannel:
    return _product_family(family.kind, float(family.s))


@lru_cache(maxsize=4096)
def _product_family(kind: str, s: float) -> TwoQubitChannel:
    return product_channel(single_qubit_kraus(kind, s), label=f"{kind}(s={s:g})")


# ---------------------------------------------------------------------------
# Closed-form element tables for the three product channels.

def _ad_table(e: ThermalElements, s: float) -> ThermalElements:
    r = math.sqrt(1.0 - s)
    return ThermalElements(
        e11=e.e11 + s * s * e.e11 + 2.0 * s * e.e22,
        e22=-(1.0 - s) * (s * e.e11 + e.e22),
        e12=r * (1.0 + s) * e.e12,
        e13=r * (1.0 + s) * e.e13,
        e14=(1.0 - s) * e.e14,
        e23=(1.0 - s) * e.e23,
    )


def _pf_table(e: ThermalElements, s: float) -> ThermalElements:
    f = 2.0 * s - 1.0
    return ThermalElements(e.e11, e.e22, f * e.e12, f * e.e13, f * f * e.e14, f * f * e.e23)


def _pd_table(e: ThermalElements, s: float) -> ThermalElements:
    r = math.sqrt(1.0 - s)
    return ThermalElements(e.e11, e.e22, r * e.e12, r * e.e13, (1.0 - s) * e.e14, (1.0 - s) * e.e23)


_TABLES = {"amplitude_damping": _ad_table, "phase_flip": _pf_table, "phase_damping": _pd_table}


@dataclass(frozen=True)
class TableComparison:
    """Closed-form element table versus exact Kraus evolution of the same state."""
    kind: str
    s: float
    table: ThermalElements
    table_matrix: np.ndarray = field(repr=False)
    oracle_matrix: np.ndarray = field(repr=False)
    max_abs_diff: float
    trace_defect: float
    min_population: float
    min_eigenvalue: float
    oracle_defects: dict

    @property
    def agrees(self) -> bool:
        return self.max_abs_diff <= CPTP_TOL

    @property
    def is_valid_state(self) -> bool:
        return (abs(self.trace_defect) <= 1e-12 and self.min_eigenvalue >= -1e-10)


def table_elements(elements: ThermalElements, kind: str, s: float) -> ThermalElements:
    kind = canonical_kind(kind)
    if not 0.0 <= s <= 1.0:
        raise InvalidParameter(f"decoherence parameter s must lie in [0, 1], got {s!r}")
    return _TABLES[kind](elements, s)


def paper_element_tables(elements: ThermalElements, kind: str, s: float) -> TableComparison:
    """Evaluate the closed-form table for ``kind`` at ``s`` and compare with Kraus evolution.

    The phase-flip and phase-damping tables reproduce the Kraus output. The
    amplitude-damping table does not: its populations give a trace different
    from one and a negative ``e22``. The returned report quantifies that gap.
    """
    kind = canonical_kind(kind)
    table = table_elements(elements, kind, s)
    tm = table.to_matrix()
    oracle = apply_channel(elements.to_matrix(), make_channel(ChannelFamily(kind, s)))
    return TableComparison(
        kind=kind, s=s, table=table, table_matrix=tm, oracle_matrix=oracle,
        max_abs_diff=float(np.max(np.abs(tm - oracle))),
        trace_defect=float(np.trace(tm).real - 1.0),
        min_population=float(min(table.e11, table.e22)),
        min_eigenvalue=float(np.linalg.eigvalsh(tm)[0]),
        oracle_defects=state_defects(oracle),
    )
