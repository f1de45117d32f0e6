"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion is reported rather than hidden.
"""
import numpy as np
import pytest

from dqdnoise.channels import (
    CHANNEL_KINDS,
    ChannelFamily,
    apply_channel,
    correlated_dephasing_channel,
    make_channel,
    memory_kernel_F,
    paper_element_tables,
    rtn_monte_carlo_kernel,
)
from dqdnoise.core import (
    ModelParams,
    ThermalElements,
    build_hamiltonian,
    eigenvectors,
    spectrum,
    thermal_elements,
    thermal_state_numeric,
)
from dqdnoise.errors import ComplexEigenvalue
from dqdnoise.measures import concurrence_numeric, concurrence_paper, l1_coherence, l1_coherence_paper_eq16
from dqdnoise.presets import PANELS, render_panel, resolve
from dqdnoise.states import (
    bell_phi_plus,
    maximally_mixed,
    pure_state,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
    state_defects,
)
from dqdnoise.validate import random_model_params

N = 500
SEED = 20240601
# floating-point slack for "non-increasing" on plateaus
MONO_TOL = 1e-12


@pytest.fixture
def models():
    rng = np.random.default_rng(SEED)
    return [random_model_params(rng) for _ in range(N)]


def _valid(rho, herm=1e-12, trace=1e-12, psd=1e-10):
    d = state_defects(rho)
    return d["hermiticity"] <= herm and d["trace"] <= trace and d["min_eigenvalue"] >= -psd


def test_criterion_01_spectral_oracle(models, acceptance_report):
    worst_rel = worst_res = 0.0
    for p in models:
        h = build_hamiltonian(p)
        e = np.array(spectrum(p).e)
        num = np.linalg.eigvalsh(h)
        worst_rel = max(worst_rel, float(np.max(np.abs(np.sort(e) - num) / np.abs(num))))
        vecs = eigenvectors(p)
        worst_res = max(worst_res, float(np.max(np.linalg.norm(h @ vecs - vecs * e, axis=0))))
    ok = worst_rel < 1e-10 and worst_res < 1e-9
    acceptance_report("1 spectral oracle", ok, f"max rel eig error {worst_rel:.2e}, max residual {worst_res:.2e}")
    assert ok


def test_criterion_02_thermal_state_oracle(models, acceptance_report):
    worst = 0.0
    invalid = 0
    for p in models:
        closed = thermal_elements(p)
        oracle = ThermalElements.from_matrix(thermal_state_numeric(p))
        worst = max(worst, float(np.max(np.abs(np.subtract(closed.as_tuple(), oracle.as_tuple())))))
        invalid += not _valid(closed.to_matrix())
    beta0 = thermal_elements(ModelParams(10.0, 15.0, 25.0, float("inf"))).to_matrix()
    beta0_ok = np.allclose(beta0, np.eye(4) / 4, atol=1e-15, rtol=0)
    ok = worst < 1e-10 and invalid == 0 and beta0_ok
    acceptance_report("2 thermal-state oracle", ok,
                      f"max elementwise diff {worst:.2e}, invalid states {invalid}, beta=0 -> I/4 {beta0_ok}")
    assert ok


def test_criterion_03_concurrence_ground_truth(acceptance_report):
    rng = np.random.default_rng(SEED)
    bell = abs(concurrence_numeric(bell_phi_plus()).value - 1.0)
    mixed = concurrence_numeric(maximally_mixed()).value
    worst_pure = worst_lu = 0.0
    for _ in range(N):
        psi = random_pure_state(rng)
        a, b, c, d = psi / np.linalg.norm(psi)
        worst_pure = max(worst_pure, abs(concurrence_numeric(pure_state(psi)).value - 2 * abs(a * d - b * c)))
        rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
        u = random_local_unitary(rng)
        worst_lu = max(worst_lu, abs(concurrence_numeric(rho).value
                                     - concurrence_numeric(u @ rho @ u.conj().T).value))
    ok = bell <= 1e-10 and mixed == 0.0 and worst_pure < 1e-9 and worst_lu < 1e-9
    acceptance_report("3 concurrence ground truth", ok, f"Bell error {bell:.1e}, I/4 -> {mixed:g}, "
                      f"pure-state max error {worst_pure:.2e}, local-unitary drift {worst_lu:.2e}")
    assert ok


def test_criterion_04_paper_formula_reconciliation(models, acceptance_report):
    c_disagree = c_undefined = l1_disagree = 0
    authoritative_ok = True
    for p in models:
        el = thermal_elements(p)
        rho = el.to_matrix()
        c = concurrence_numeric(rho).value
        q = l1_coherence(rho).value
        authoritative_ok &= _valid(rho) and 0.0 <= c <= 1.0 + 1e-10 and q >= 0.0
        try:
            c_disagree += abs(concurrence_paper(el).value - c) > 1e-8
        except ComplexEigenvalue:
            c_undefined += 1
        l1_disagree += abs(l1_coherence_paper_eq16(el).value - q) > 1e-8
    detail = (f"closed-form concurrence disagrees {c_disagree / N:.1%}, undefined {c_undefined / N:.1%}; "
              f"closed-form l1 disagrees {l1_disagree / N:.1%} (reported, not failed)")
    acceptance_report("4 paper-formula reconciliation", authoritative_ok, detail)
    assert authoritative_ok


def test_criterion_05_memory_kernel(acceptance_report):
    t = np.linspace(0.0, 40.0, 4001)
    problems = []
    for tau in (0.1, 0.2, 0.25, 1.0, 5.0):
        if memory_kernel_F(0.0, tau) != 1.0:
            problems.append(f"F(0) != 1 at tau={tau}")
        if np.max(np.abs(memory_kernel_F(t, tau))) > 1.0:
            problems.append(f"|F| > 1 at tau={tau}")
    if np.any(np.diff(memory_kernel_F(t, 0.2)) > 0):
        problems.append("tau=0.2 increases")
    f5 = memory_kernel_F(t, 5.0)
    changes = int(np.count_nonzero(np.signbit(f5[1:]) != np.signbit(f5[:-1])))
    if changes < 1:
        problems.append("tau=5 has no sign change")
    tb = np.linspace(0.0, 20.0, 2001)
    limit = np.exp(-tb / 0.5) * (1 + tb / 0.5)
    gap = max(float(np.max(np.abs(memory_kernel_F(tb, 0.25 + d) - limit))) for d in (-1e-6, 0.0, 1e-6))
    if gap >= 1e-4:
        problems.append(f"boundary gap {gap:.1e}")
    ok = not problems
    acceptance_report("5 memory kernel", ok, "; ".join(problems) or
                      f"tau=5 sign changes {changes}, boundary gap {gap:.1e}")
    assert ok


@pytest.mark.slow
def test_criterion_06_rtn_monte_carlo(acceptance_report):
    grid = np.linspace(0.0, 10.0, 20)
    fractions = {}
    for tau in (0.2, 5.0):
        est = rtn_monte_carlo_kernel(tau, grid, 100_000, seed=SEED)
        fractions[tau] = float(np.mean(est.z_scores(memory_kernel_F(grid, tau)) <= 3.0))
    ok = all(f >= 0.95 for f in fractions.values())
    acceptance_report("6 RTN Monte Carlo oracle", ok,
                      ", ".join(f"tau={k:g}: {v:.0%} within 3 sigma" for k, v in fractions.items()))
    assert ok


def test_criterion_07_channel_soundness(acceptance_report):
    rng = np.random.default_rng(SEED)
    channels = [make_channel(ChannelFamily(k, s)) for k in CHANNEL_KINDS for s in np.linspace(0, 1, 21)]
    channels += [correlated_dephasing_channel(p, mu) for p in np.linspace(0, 1, 11) for mu in (0, 0.3, 0.7, 1)]
    worst_cptp = max(ch.completeness_defect() for ch in channels)
    worst_h = worst_t = 0.0
    min_eig = 0.0
    for i in range(N):
        out = apply_channel(random_density_matrix(rng, rank=int(rng.integers(1, 5))), channels[i % len(channels)])
        d = state_defects(out)
        worst_h, worst_t = max(worst_h, d["hermiticity"]), max(worst_t, d["trace"])
        min_eig = min(min_eig, d["min_eigenvalue"])
    ground = np.zeros((4, 4))
    ground[0, 0] = 1.0
    ad1 = make_channel(ChannelFamily("amplitude_damping", 1.0))
    worst_ad = max(float(np.max(np.abs(apply_channel(random_density_matrix(rng), ad1) - ground)))
                   for _ in range(N))
    ok = worst_cptp <= 1e-12 and worst_h <= 1e-12 and worst_t <= 1e-12 and min_eig >= -1e-10 and worst_ad <= 1e-12
    acceptance_report("7 channel soundness", ok,
                      f"{len(channels)} channels, CPTP defect {worst_cptp:.1e}; hermiticity {worst_h:.1e}, "
                      f"trace {worst_t:.1e}, min eig {min_eig:.1e}; AD(s=1) deviation {worst_ad:.1e}")
    assert ok


def test_criterion_08_paper_table_adjudication(models, acceptance_report):
    grid = (0.0, 0.25, 0.5, 0.75, 1.0)
    worst = {"phase_flip": 0.0, "phase_damping": 0.0}
    ad_trace = 0.0
    ad_min_pop = np.inf
    oracle_clean = True
    for p in models[:100]:
        el = thermal_elements(p)
        for s in grid:
            for kind in worst:
                worst[kind] = max(worst[kind], paper_element_tables(el, kind, s).max_abs_diff)
            ad = paper_element_tables(el, "amplitude_damping", s)
            ad_trace = max(ad_trace, abs(ad.trace_defect))
            ad_min_pop = min(ad_min_pop, ad.min_population)
            oracle_clean &= _valid(ad.oracle_matrix)
    ok = max(worst.values()) <= 1e-12 and ad_trace > 0 and ad_min_pop < 0 and oracle_clean
    acceptance_report("8 paper-table adjudication", ok,
                      f"PF diff {worst['phase_flip']:.1e}, PD diff {worst['phase_damping']:.1e}; AD table "
                      f"trace defect {ad_trace:.3g}, min population {ad_min_pop:.3g} (expected); Kraus oracle "
                      f"clean {oracle_clean}")
    assert ok


def _first_index(mask):
    return int(np.argmax(mask)) if np.any(mask) else len(mask)


def test_criterion_09a_fig1a_decay(acceptance_report):
    res = render_panel(PANELS["fig1a"])
    temps = ("1e-6", "5", "14", "20")
    cols = [res.column(f"C(T={t})") for t in temps]
    monotone = all(np.all(np.diff(c) <= MONO_TOL) for c in cols)
    zeros = [_first_index(c == 0.0) for c in cols]
    ordered = all(a >= b for a, b in zip(zeros, zeros[1:])) and zeros[-1] < zeros[0]
    t = res.column("t")
    labels = [f"T={T}: {'never' if z == len(t) else f't={t[z]:g}'}" for T, z in zip(temps, zeros)]
    ok = monotone and ordered
    acceptance_report("9a fig1a monotone, hot columns vanish first", ok,
                      f"monotone {monotone}; first zero " + ", ".join(labels))
    assert ok


def test_criterion_09b_fig2a_oscillation(acceptance_report):
    c = render_panel(PANELS["fig2a"]).column("C(T=1e-6)")
    peaks = int(np.sum((c[1:-1] > c[:-2]) & (c[1:-1] > c[2:])))
    ok = peaks >= 2
    acceptance_report("9b fig2a low-T oscillation", ok, f"{peaks} local maxima")
    assert ok


def test_criterion_09c_fig5_coherence_dominates(acceptance_report):
    gaps = {pid: float(np.min(render_panel(PANELS[pid]).column("C_l1_minus_C"))) for pid in ("fig5a", "fig5b")}
    ok = all(g >= 0 for g in gaps.values())
    acceptance_report("9c fig5 C_l1 >= C", ok, ", ".join(f"{k}: min(C_l1 - C) = {v:.3g}" for k, v in gaps.items()))
    assert ok


def _surface(res, measure):
    s = res.column("s")
    n_s = len(np.unique(s))
    return res.column(measure).reshape(n_s, -1)


def test_criterion_09d_phase_flip_symmetry(acceptance_report):
    worst_sym = 0.0
    interior_ok = True
    for fig, measure in (("fig7", "C"), ("fig10", "C_l1")):
        for panel in resolve(fig):
            grid = _surface(render_panel(panel), measure)
            worst_sym = max(worst_sym, float(np.max(np.abs(grid - grid[::-1]))))
            for col in grid.T:
                inner = col[1:-1].min()
                # constant-zero columns have no strict minimum to find
                if col[0] > 1e-12:
                    interior_ok &= inner < col[0]
                else:
                    interior_ok &= inner <= col[0]
    ok = worst_sym <= 1e-10 and interior_ok
    acceptance_report("9d fig7/fig10 PF symmetry and interior minimum", ok,
                      f"max |v(s) - v(1-s)| {worst_sym:.1e}, interior minimum {interior_ok}")
    assert ok


def test_criterion_09e_phase_damping_monotone(acceptance_report):
    worst_rise = 0.0
    for fig, measure in (("fig8", "C"), ("fig11", "C_l1")):
        for panel in resolve(fig):
            grid = _surface(render_panel(panel), measure)
            worst_rise = max(worst_rise, float(np.max(np.diff(grid, axis=0))))
    ok = worst_rise <= MONO_TOL
    acceptance_report("9e fig8/fig11 PD monotone in s", ok, f"max increase along s {worst_rise:.1e}")
    assert ok


def test_criterion_09f_fig12a_concurrence_vanishes_first(acceptance_report):
    res = render_panel(PANELS["fig12a"])
    s = res.column("s")
    c, q = res.column("C"), res.column("C_l1")
    monotone = bool(np.all(np.diff(c) <= MONO_TOL) and np.all(np.diff(q) <= MONO_TOL))
    i_c = _first_index(c == 0.0)
    i_q = _first_index(q < 0.01)
    at = lambda i: "never" if i == len(s) else f"s={s[i]:g}"
    ok = monotone and i_c < i_q
    acceptance_report("9f fig12a concurrence vanishes before coherence < 0.01", ok,
                      f"monotone {monotone}; C first 0 at {at(i_c)}, C_l1 first < 0.01 at {at(i_q)}")
    assert ok


@pytest.mark.parametrize("pid", ["fig2a", "fig5b", "fig7b", "fig12a"])
def test_criterion_10_determinism(pid, acceptance_report):
    panel = PANELS[pid]
    serial = render_panel(panel, workers=1).to_csv()
    again = render_panel(panel, workers=1).to_csv()
    parallel = render_panel(panel, workers=2).to_csv()
    ok = serial == again == parallel
    acceptance_report(f"10 determinism ({pid})", ok, "byte-identical for workers 1, 1, 2" if ok else "CSV differs")
    assert ok
