import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqdnoise.channels import (
    CHANNEL_KINDS,
    ChannelFamily,
    MemoryParams,
    TwoQubitChannel,
    apply_channel,
    correlated_dephasing,
    correlated_dephasing_channel,
    correlated_pauli_probabilities,
    decoherence_factor,
    flip_probability,
    identity_channel,
    make_channel,
    memory_kernel_F,
    paper_element_tables,
    s_from_time,
    single_qubit_kraus,
)
from dqdnoise.core import ModelParams, thermal_elements, thermal_state
from dqdnoise.errors import InvalidParameter, NotCPTP
from dqdnoise.measures import concurrence_numeric, l1_coherence
from dqdnoise.states import bell_phi_plus, random_density_matrix, state_defects

FIG = ModelParams(10.0, 15.0, 25.0, 0.1)
S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
seeds = st.integers(0, 2**32 - 1)
unit = st.floats(0.0, 1.0)
GROUND = np.zeros((4, 4))
GROUND[0, 0] = 1.0


def _expm(a):
    # scaling and squaring with a Taylor series; fine for 2x2
    k = max(0, int(np.ceil(np.log2(max(np.abs(a).max(), 1e-300)))) + 4)
    m = a / 2**k
    out, term = np.eye(2), np.eye(2)
    for n in range(1, 30):
        term = term @ m / n
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def kernel_oracle(t, tau):
    """Solve F'' + F'/tau + 4F = 0, F(0) = 1, F'(0) = 0 via the companion-matrix exponential."""
    a = np.array([[0.0, 1.0], [-4.0, -1.0 / tau]])
    return np.array([_expm(a * ti)[0, 0] for ti in np.atleast_1d(t)])


def loop_apply(rho, ch):
    return sum(k @ rho @ k.conj().T for k in ch.kraus_ops)


# --- Kraus families -------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.sampled_from(CHANNEL_KINDS), unit)
def test_product_channels_are_cptp(kind, s):
    assert make_channel(ChannelFamily(kind, s)).completeness_defect() < 1e-12


@settings(max_examples=100, deadline=None)
@given(unit, unit)
def test_correlated_dephasing_channel_is_cptp(p, mu):
    assert correlated_dephasing_channel(p, mu).completeness_defect() < 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from(CHANNEL_KINDS), unit)
def test_apply_matches_explicit_sum(seed, kind, s):
    rho = random_density_matrix(np.random.default_rng(seed))
    ch = make_channel(ChannelFamily(kind, s))
    np.testing.assert_allclose(apply_channel(rho, ch), loop_apply(rho, ch), atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(seeds, st.sampled_from(CHANNEL_KINDS), unit, st.integers(1, 4))
def test_apply_preserves_state_invariants(seed, kind, s, rank):
    rho = random_density_matrix(np.random.default_rng(seed), rank=rank)
    d = state_defects(apply_channel(rho, make_channel(ChannelFamily(kind, s))))
    assert d["hermiticity"] < 1e-12 and d["trace"] < 1e-12 and d["min_eigenvalue"] >= -1e-10


def test_identity_channel_leaves_state(rng):
    rho = random_density_matrix(rng)
    np.testing.assert_allclose(apply_channel(rho, identity_channel()), rho, atol=1e-15)


def test_broken_kraus_set_is_rejected(rng):
    ch = TwoQubitChannel((1.1 * np.eye(4),), label="scaled identity")
    assert not ch.is_cptp()
    with pytest.raises(NotCPTP):
        apply_channel(random_density_matrix(rng), ch)


def test_single_qubit_kraus_forms():
    k0, k1 = single_qubit_kraus("ad", 0.36)
    np.testing.assert_allclose(k0, [[1, 0], [0, 0.8]])
    np.testing.assert_allclose(k1, [[0, 0.6], [0, 0]])
    with pytest.raises(InvalidParameter):
        single_qubit_kraus("phase_flip", 1.5)
    with pytest.raises(InvalidParameter):
        single_qubit_kraus("bit_flip", 0.5)


def test_amplitude_damping_endpoints(rng):
    rho = random_density_matrix(rng)
    np.testing.assert_allclose(apply_channel(rho, make_channel(ChannelFamily("ad", 0.0))), rho, atol=1e-15)
    out = apply_channel(rho, make_channel(ChannelFamily("ad", 1.0)))
    assert np.max(np.abs(out - GROUND)) < 1e-12


def test_phase_flip_at_one_is_identity(rng):
    ch = make_channel(ChannelFamily("phase_flip", 1.0))
    rho = random_density_matrix(rng)
    np.testing.assert_allclose(apply_channel(rho, ch), rho, atol=1e-15)


def test_phase_damping_on_bell_state():
    out = apply_channel(bell_phi_plus(), make_channel(ChannelFamily("phase_damping", 0.5)))
    assert out[0, 3] == pytest.approx(0.25)
    assert out[0, 0] == pytest.approx(0.5)
    assert concurrence_numeric(out).value == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(0.1, 40.0), st.floats(0.01, 30.0))
def test_phase_flip_symmetry_on_thermal_states(s, v, temp):
    rho = thermal_state(ModelParams(10.0, 15.0, v, temp))
    a = apply_channel(rho, make_channel(ChannelFamily("pf", s)))
    b = apply_channel(rho, make_channel(ChannelFamily("pf", 1.0 - s)))
    assert abs(concurrence_numeric(a).value - concurrence_numeric(b).value) < 1e-10
    assert abs(l1_coherence(a).value - l1_coherence(b).value) < 1e-10


def test_s_from_time():
    assert s_from_time(0.0, 2.0) == 0.0
    assert s_from_time(1.0, 2.0) == pytest.approx(1 - math.exp(-2.0))
    fam = ChannelFamily.from_time("pd", 0.5, 1.0)
    assert fam.s == pytest.approx(1 - math.exp(-0.5)) and fam.decay_rate == 1.0
    with pytest.raises(InvalidParameter):
        s_from_time(1.0, 0.0)


# --- element tables -------------------------------------------------------

@pytest.mark.parametrize("kind", ["phase_flip", "phase_damping"])
@pytest.mark.parametrize("s", S_GRID)
def test_pf_pd_tables_match_kraus(kind, s):
    cmp = paper_element_tables(thermal_elements(FIG), kind, s)
    assert cmp.max_abs_diff < 1e-12 and cmp.agrees and cmp.is_valid_state


def test_pf_table_factors():
    el = thermal_elements(FIG)
    t = paper_element_tables(el, "pf", 0.25).table
    assert t.e12 == pytest.approx((2 * 0.25 - 1) * el.e12)
    assert t.e14 == pytest.approx((1 - 2 * 0.25) ** 2 * el.e14)


def test_pd_table_full_dephasing():
    el = thermal_elements(FIG)
    t = paper_element_tables(el, "pd", 1.0).table
    assert (t.e12, t.e13, t.e14, t.e23) == (0.0, 0.0, 0.0, 0.0)
    assert (t.e11, t.e22) == (el.e11, el.e22)


def test_ad_table_is_inconsistent():
    el = thermal_elements(FIG)
    cmp = paper_element_tables(el, "amplitude_damping", 0.5)
    assert cmp.table.e22 == pytest.approx(-(1 - 0.5) * (0.5 * el.e11 + el.e22))
    assert cmp.table.e22 < 0
    assert not cmp.agrees and not cmp.is_valid_state
    d = cmp.oracle_defects
    assert d["trace"] < 1e-12 and d["min_eigenvalue"] >= -1e-10


# --- memory kernel --------------------------------------------------------

@pytest.mark.parametrize("tau", [0.1, 0.2, 0.25, 1.0, 5.0])
def test_kernel_matches_ode_oracle(tau):
    t = np.linspace(0.0, 20.0, 81)
    np.testing.assert_allclose(memory_kernel_F(t, tau), kernel_oracle(t, tau), atol=1e-9)


@pytest.mark.parametrize("tau", [0.1, 0.2, 0.25, 1.0, 5.0])
def test_kernel_bounds(tau):
    t = np.linspace(0.0, 40.0, 4001)
    f = memory_kernel_F(t, tau)
    assert memory_kernel_F(0.0, tau) == 1.0
    assert np.all(np.abs(f) <= 1.0)


def test_kernel_regimes():
    t = np.linspace(0.0, 40.0, 4001)
    f = memory_kernel_F(t, 0.2)
    assert np.all(f > 0) and np.all(np.diff(f) <= 0)
    g = memory_kernel_F(t, 5.0)
    assert np.count_nonzero(np.diff(np.sign(g[1:]))) >= 1


def test_kernel_boundary_continuity():
    t = np.linspace(0.0, 20.0, 2001)
    limit = np.exp(-t / 0.5) * (1 + t / 0.5)
    np.testing.assert_allclose(memory_kernel_F(t, 0.25), limit, atol=1e-15)
    for tau in (0.25 - 1e-6, 0.25 + 1e-6):
        assert np.max(np.abs(memory_kernel_F(t, tau) - limit)) < 1e-4


def test_kernel_large_time_is_stable():
    # overdamped branch must not overflow through cosh/sinh
    assert memory_kernel_F(1e6, 0.01) == pytest.approx(0.0, abs=1e-300)
    assert np.isfinite(memory_kernel_F(1e4, 0.2))


def test_literal_convention():
    with pytest.raises(InvalidParameter):
        memory_kernel_F(1.0, 0.25, convention="literal")
    tau, t = 5.0, 3.0
    nu = math.sqrt(abs(1 - 4 * tau * tau))
    a = t / (2 * tau)
    expected = math.exp(-a) * (math.cos(nu * a) + math.sin(nu * a) / nu)
    assert memory_kernel_F(t, tau, convention="literal") == pytest.approx(expected, rel=1e-14)


def test_kernel_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        memory_kernel_F(-1.0, 0.2)
    with pytest.raises(InvalidParameter):
        memory_kernel_F(1.0, 0.0)


def test_flip_probability():
    assert flip_probability(0.0, 0.2) == 0.0
    assert flip_probability(500.0, 0.2) == pytest.approx(0.5)
    assert flip_probability(5.0, 0.2) == pytest.approx((1 - memory_kernel_F(5.0, 0.2)) / 2)


def test_decoherence_factor():
    assert decoherence_factor(0.0, 5.0, 0.3) == 1.0
    assert decoherence_factor(7.0, 5.0, 1.0) == 1.0
    f = memory_kernel_F(10.0, 5.0)
    assert decoherence_factor(10.0, 5.0, 0.3) == pytest.approx(0.3 + 0.7 * f * f)
    assert np.all(decoherence_factor(np.linspace(0, 40, 101), 0.2, 0.3) >= 0.3)


def test_memory_params_validation():
    assert MemoryParams(5.0, 0.3).non_markovian
    assert not MemoryParams(0.2, 0.3).non_markovian
    with pytest.raises(InvalidParameter):
        MemoryParams(0.2, 1.5)


def test_pauli_probabilities_examples():
    p = correlated_pauli_probabilities(0.5, 0.0)
    assert p[0, 0] == p[0, 3] == p[3, 0] == p[3, 3] == pytest.approx(0.25)
    p = correlated_pauli_probabilities(0.3, 1.0)
    assert p[0, 0] == pytest.approx(0.7) and p[3, 3] == pytest.approx(0.3)
    assert p[0, 3] == p[3, 0] == 0.0
    p = correlated_pauli_probabilities(0.2, 0.3)
    assert p[0, 0] == pytest.approx(0.688)
    assert p[3, 3] == pytest.approx(0.088)
    assert p[0, 3] == pytest.approx(0.112) and p[3, 0] == pytest.approx(0.112)
    assert p.sum() == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(unit, unit)
def test_pauli_probabilities_normalized_with_marginals(p, mu):
    probs = correlated_pauli_probabilities(p, mu)
    assert probs.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(probs.sum(axis=1), [1 - p, 0, 0, p], atol=1e-15)


def test_fully_correlated_fair_dephasing():
    ch = correlated_dephasing_channel(0.5, 1.0)
    rho = np.full((4, 4), 0.25, dtype=complex)
    out = apply_channel(rho, ch)
    assert abs(out[0, 1]) < 1e-15
    assert out[0, 3] == pytest.approx(0.25)


def test_correlated_dephasing_identity_cases(rng):
    rho = random_density_matrix(rng)
    for mode in ("paper_uniform_gamma", "kraus_exact"):
        np.testing.assert_allclose(correlated_dephasing(rho, 0.0, 0.2, 0.3, mode=mode), rho, atol=1e-15)
    np.testing.assert_allclose(correlated_dephasing(rho, 3.0, 0.2, 1.0), rho, atol=1e-15)


def test_correlated_dephasing_modes_elementwise():
    rho = thermal_state(FIG)
    t, tau, mu = 2.0, 0.2, 0.3
    f = memory_kernel_F(t, tau)
    g = decoherence_factor(t, tau, mu)
    paper = correlated_dephasing(rho, t, tau, mu, mode="paper_uniform_gamma")
    exact = correlated_dephasing(rho, t, tau, mu, mode="kraus_exact")
    brute = loop_apply(rho, correlated_dephasing_channel(flip_probability(t, tau), mu))
    np.testing.assert_allclose(exact, brute, atol=1e-15)
    off = ~np.eye(4, dtype=bool)
    np.testing.assert_allclose(paper[off], g * rho[off], atol=1e-15)
    for i, j in ((0, 1), (0, 2), (1, 3), (2, 3)):
        assert exact[i, j] == pytest.approx(f * rho[i, j], abs=1e-15)
    for i, j in ((0, 3), (1, 2)):
        assert exact[i, j] == pytest.approx(g * rho[i, j], abs=1e-15)
    for out in (paper, exact):
        d = state_defects(out)
        assert d["trace"] < 1e-12 and d["min_eigenvalue"] >= -1e-10
