"""Invariant suite behind ``dqdnoise validate``.

Each check yields one line: ``PASS``/``FAIL`` for hard invariants of the
authoritative paths, ``INFO`` for reports on the closed-form paths,
whose disagreements are documented rather than failed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .channels import (
    CHANNEL_KINDS,
    ChannelFamily,
    TwoQubitChannel,
    apply_channel,
    correlated_dephasing_channel,
    make_channel,
    memory_kernel_F,
    paper_element_tables,
    rtn_monte_carlo_kernel,
)
from .core import (
    ModelParams,
    ThermalElements,
    build_hamiltonian,
    eigenvectors,
    spectrum,
    thermal_elements,
    thermal_state_numeric,
)
from .errors import ComplexEigenvalue, DQDError, NotCPTP
from .measures import concurrence_numeric, concurrence_paper, l1_coherence, l1_coherence_paper_eq16
from .states import (
    HERMITIAN_TOL,
    PSD_TOL,
    TRACE_TOL,
    bell_phi_plus,
    maximally_mixed,
    pure_state,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
    state_defects,
)
from .sweep import DEFAULT_SEED

EXIT_OK = 0
EXIT_NUMERIC = 3
S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
MC_GRID = np.linspace(0.0, 10.0, 20)


def random_model_params(rng: np.random.Generator) -> ModelParams:
    """Couplings in (0.1, 20), V in [0, 40], T log-uniform in [0.05, 50]."""
    o1, o2 = rng.uniform(0.1, 20.0, size=2)
    v = rng.uniform(0.0, 40.0)
    t = float(np.exp(rng.uniform(np.log(0.05), np.log(50.0))))
    return ModelParams(float(o1), float(o2), float(v), t)


@dataclass
class Check:
    name: str
    status: Literal["PASS", "FAIL", "INFO"]
    detail: str

    def line(self) -> str:
        return f"{self.status} {self.name}: {self.detail}"


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.status == "FAIL"]

    @property
    def exit_code(self) -> int:
        return EXIT_NUMERIC if self.failed else EXIT_OK


def _hard(name: str, ok: bool, detail: str) -> Check:
    return Check(name, "PASS" if ok else "FAIL", detail)


def check_spectrum(rng, n: int) -> Check:
    worst_eig = worst_res = 0.0
    for _ in range(n):
        p = random_model_params(rng)
        h = build_hamiltonian(p)
        e = np.sort(spectrum(p).e)
        num = np.linalg.eigvalsh(h)
        worst_eig = max(worst_eig, float(np.max(np.abs(e - num) / np.maximum(np.abs(num), 1.0))))
        vecs = eigenvectors(p)
        e_cols = spectrum(p).e
        worst_res = max(worst_res, float(np.max(np.linalg.norm(h @ vecs - vecs * e_cols, axis=0))))
    return _hard("spectrum", worst_eig < 1e-10 and worst_res < 1e-9,
                 f"{n} models, max rel eigenvalue error {worst_eig:.2e}, max residual {worst_res:.2e}")


def check_thermal(rng, n: int) -> Check:
    worst = 0.0
    bad_states = 0
    for _ in range(n):
        p = random_model_params(rng)
        closed = np.array(thermal_elements(p).as_tuple())
        numeric = np.array(ThermalElements.from_matrix(thermal_state_numeric(p)).as_tuple())
        worst = max(worst, float(np.max(np.abs(closed - numeric))))
        d = state_defects(thermal_elements(p).to_matrix())
        if d["hermiticity"] > HERMITIAN_TOL or d["trace"] > TRACE_TOL or d["min_eigenvalue"] < -PSD_TOL:
            bad_states += 1
    inf_t = thermal_elements(ModelParams(3.0, 7.0, 11.0, float("inf"))).to_matrix()
    beta0 = float(np.max(np.abs(inf_t - np.eye(4) / 4)))
    return _hard("thermal_state", worst < 1e-10 and bad_states == 0 and beta0 < 1e-15,
                 f"{n} models, max closed-vs-numeric diff {worst:.2e}, invalid states {bad_states}, "
                 f"beta=0 deviation from I/4 {beta0:.1e}")


def check_concurrence(rng, n: int) -> Check:
    bell = abs(concurrence_numeric(bell_phi_plus()).value - 1.0)
    mixed = concurrence_numeric(maximally_mixed()).value
    worst_pure = worst_lu = 0.0
    for _ in range(n):
        psi = random_pure_state(rng)
        psi = psi / np.linalg.norm(psi)
        exact = 2 * abs(psi[0] * psi[3] - psi[1] * psi[2])
        worst_pure = max(worst_pure, abs(concurrence_numeric(pure_state(psi)).value - exact))
        rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        u = random_local_unitary(rng)
        rotated = u @ rho @ u.conj().T
        worst_lu = max(worst_lu, abs(concurrence_numeric(rho).value - concurrence_numeric(rotated).value))
    ok = bell < 1e-10 and mixed == 0.0 and worst_pure < 1e-9 and worst_lu < 1e-9
    return _hard("concurrence", ok, f"Bell error {bell:.1e}, I/4 -> {mixed:g}, pure-state max error "
                 f"{worst_pure:.2e}, local-unitary max drift {worst_lu:.2e}")


def _all_channels() -> list[TwoQubitChannel]:
    chans = [make_channel(ChannelFamily(k, s)) for k in CHANNEL_KINDS for s in np.linspace(0, 1, 11)]
    chans += [correlated_dephasing_channel(p, mu) for p in (0.0, 0.1, 0.5, 1.0) for mu in (0.0, 0.3, 1.0)]
    return chans


def check_cptp(channels: list[TwoQubitChannel]) -> Check:
    worst = max(ch.completeness_defect() for ch in channels)
    return _hard("kraus_completeness", worst < 1e-12,
                 f"{len(channels)} channels, max |sum K^dag K - I| {worst:.1e}")


def check_apply(rng, n: int, channels: list[TwoQubitChannel]) -> Check:
    worst_h = worst_t = 0.0
    worst_neg = 0.0
    try:
        for i in range(n):
            rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
            out = apply_channel(rho, channels[i % len(channels)])
            d = state_defects(out)
            worst_h = max(worst_h, d["hermiticity"])
            worst_t = max(worst_t, d["trace"])
            worst_neg = min(worst_neg, d["min_eigenvalue"])
    except NotCPTP as exc:
        return Check("apply_channel", "FAIL", f"NotCPTP: {exc}")
    ok = worst_h < 1e-12 and worst_t < 1e-12 and worst_neg >= -1e-10
    return _hard("apply_channel", ok, f"{n} states, max hermiticity defect {worst_h:.1e}, "
                 f"max trace defect {worst_t:.1e}, min eigenvalue {worst_neg:.1e}")


def check_ad_endpoint(rng, n: int) -> Check:
    target = np.zeros((4, 4))
    target[0, 0] = 1.0
    ch = make_channel(ChannelFamily("amplitude_damping", 1.0))
    worst = max(float(np.max(np.abs(apply_channel(random_density_matrix(rng), ch) - target)))
                for _ in range(n))
    return _hard("ad_endpoint", worst < 1e-12, f"{n} states, max deviation from |00><00| {worst:.1e}")


def check_kernel() -> Check:
    t = np.linspace(0.0, 40.0, 401)
    problems = []
    for tau in (0.1, 0.2, 0.25, 1.0, 5.0):
        f = memory_kernel_F(t, tau)
        if f[0] != 1.0:
            problems.append(f"F(0) = {f[0]!r} at tau={tau}")
        if np.max(np.abs(f)) > 1.0:
            problems.append(f"|F| > 1 at tau={tau}")
    if np.any(np.diff(memory_kernel_F(t, 0.2)) > 0):
        problems.append("tau=0.2 kernel increases")
    f5 = memory_kernel_F(t, 5.0)
    if not np.any(np.signbit(f5[1:]) != np.signbit(f5[:-1])):
        problems.append("tau=5 kernel has no sign change")
    limit = np.exp(-t / 0.5) * (1 + t / 0.5)
    jump = max(float(np.max(np.abs(memory_kernel_F(t, 0.25 + d) - limit))) for d in (-1e-6, 1e-6))
    if jump >= 1e-4:
        problems.append(f"boundary discontinuity {jump:.1e}")
    return _hard("memory_kernel", not problems,
                 "; ".join(problems) if problems else f"bounds, monotonicity, oscillation ok; boundary gap {jump:.1e}")


def report_paper_paths(rng, n: int) -> list[Check]:
    c_off = l1_off = undefined = 0
    for _ in range(n):
        p = random_model_params(rng)
        el = thermal_elements(p)
        rho = el.to_matrix()
        try:
            if abs(concurrence_paper(el).value - concurrence_numeric(rho).value) > 1e-8:
                c_off += 1
        except ComplexEigenvalue:
            undefined += 1
        if abs(l1_coherence_paper_eq16(el).value - l1_coherence(rho).value) > 1e-8:
            l1_off += 1
    return [
        Check("paper_concurrence", "INFO", f"closed form disagrees with Wootters on {c_off}/{n} "
              f"models, undefined on {undefined}/{n}"),
        Check("paper_l1", "INFO", f"closed form disagrees with the matrix l1 sum on {l1_off}/{n} models"),
    ]


def report_tables(rng, n_models: int) -> list[Check]:
    out = []
    models = [random_model_params(rng) for _ in range(n_models)]
    for kind in CHANNEL_KINDS:
        worst_diff = worst_trace = 0.0
        min_pop = np.inf
        oracle_clean = True
        for p in models:
            el = thermal_elements(p)
            for s in S_GRID:
                cmp = paper_element_tables(el, kind, s)
                worst_diff = max(worst_diff, cmp.max_abs_diff)
                worst_trace = max(worst_trace, abs(cmp.trace_defect))
                min_pop = min(min_pop, cmp.min_population)
                d = cmp.oracle_defects
                oracle_clean &= d["trace"] < 1e-12 and d["hermiticity"] < 1e-12 and d["min_eigenvalue"] >= -1e-10
        detail = (f"max table-vs-Kraus diff {worst_diff:.1e}, max trace defect {worst_trace:.1e}, "
                  f"min population {min_pop:.3g}")
        if kind == "amplitude_damping":
            out.append(Check(f"table_{kind}", "INFO", detail + " (documented discrepancy)"))
        else:
            out.append(_hard(f"table_{kind}", worst_diff < 1e-12, detail))
        out.append(_hard(f"oracle_{kind}", oracle_clean, "Kraus output stays a valid state"))
    return out


def check_monte_carlo(seed: int, n_traj: int) -> list[Check]:
    out = []
    for tau in (0.2, 5.0):
        est = rtn_monte_carlo_kernel(tau, MC_GRID, n_traj, seed)
        z = est.z_scores(memory_kernel_F(MC_GRID, tau))
        frac = float(np.mean(z <= 3.0))
        out.append(_hard(f"rtn_monte_carlo(tau={tau:g})", frac >= 0.95,
                         f"{int(np.sum(z <= 3.0))}/{MC_GRID.size} grid points within 3 sigma, "
                         f"n_traj={n_traj}, max z {float(np.max(z)):.2f}"))
    return out


def broken_channel() -> TwoQubitChannel:
    """Amplitude damping with one Kraus operator scaled up: not trace preserving."""
    ks = list(make_channel(ChannelFamily("amplitude_damping", 0.4)).kraus_ops)
    ks[0] = 1.1 * ks[0]
    return TwoQubitChannel(tuple(ks), label="broken")


def run_validation(level: Literal["fast", "full"] = "fast", *, seed: int = DEFAULT_SEED,
                   n_traj: int = 100_000, inject_broken_kraus: bool = False,
                   emit: Callable[[str], None] | None = print) -> ValidationReport:
    """Run the invariant suite; ``emit`` receives one line per check."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    n = 100 if level == "fast" else 500
    rng = np.random.default_rng(seed)
    channels = _all_channels()
    if inject_broken_kraus:
        channels = [broken_channel()] + channels

    report = ValidationReport()

    def add(c: Check) -> None:
        report.checks.append(c)
        if emit is not None:
            emit(c.line())

    steps = [
        lambda: [check_spectrum(rng, n)],
        lambda: [check_thermal(rng, n)],
        lambda: [check_concurrence(rng, n)],
        lambda: [check_cptp(channels)],
        lambda: [check_apply(rng, n, channels)],
        lambda: [check_ad_endpoint(rng, 50)],
        lambda: [check_kernel()],
        lambda: report_tables(rng, 20),
        lambda: report_paper_paths(rng, n),
    ]
    if level == "full":
        steps.append(lambda: check_monte_carlo(seed, n_traj))
    for step in steps:
        try:
            for c in step():
                add(c)
        except DQDError as exc:
            add(Check("unexpected", "FAIL", f"{type(exc).__name__}: {exc}"))
    summary = (f"{len(report.failed)} hard failure(s)" if report.failed
               else "all hard invariants hold")
    if emit is not None:
        emit(f"SUMMARY {summary}")
    return report
