"""Correlated Pauli-Z dephasing driven by random telegraph noise.

The single-qubit coherence factor of a qubit dephased by a +-1 telegraph
signal (switching rate ``1/(2 tau)``, phase ``2 int Delta dt``) is::

    F(t) = exp(-t/2tau) [cos(nu t/2tau) + sin(nu t/2tau)/nu],   nu = sqrt(16 tau^2 - 1),  4 tau > 1
    F(t) = exp(-t/2tau) [cosh(nu t/2tau) + sinh(nu t/2tau)/nu], nu = sqrt(1 - 16 tau^2),  4 tau < 1
    F(t) = exp(-t/2tau) (1 + t/2tau),                                                     4 tau = 1

The ``convention="literal"`` option of :func:`memory_kernel_F` uses the
alternative frequency ``sqrt|1 - 4 tau^2|``; it does not match the
telegraph process (see ``tests/test_telegraph.py``) and is not continuous at
``4 tau = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..core import SIGMA_Z, IDENTITY_2
from ..errors import InvalidParameter
from .kraus import TwoQubitChannel, apply_channel
from ..states import validate_density_matrix

# |1 - 16 tau^2| below this uses the critical-damping limit.
BOUNDARY_TOL = 1e-9

_PAULIS = (IDENTITY_2, np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), SIGMA_Z)


@dataclass(frozen=True)
class MemoryParams:
    tau: float
    mu: float
    flip_prob_base: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidParameter(f"tau must be > 0, got {self.tau!r}")
        if not 0.0 <= self.mu <= 1.0:
            raise InvalidParameter(f"mu must lie in [0, 1], got {self.mu!r}")
        if not 0.0 <= self.flip_prob_base <= 1.0:
            raise InvalidParameter(f"flip probability must lie in [0, 1], got {self.flip_prob_base!r}")

    @property
    def non_markovian(self) -> bool:
        return 4 * self.tau > 1


def _check_kernel_args(t, tau):
    if not tau > 0:
        raise InvalidParameter(f"tau must be > 0, got {tau!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise InvalidParameter("t must be finite and >= 0")
    return t


def _kernel(t: np.ndarray, tau: float, nu_sq_signed: float) -> np.ndarray:
    # nu_sq_signed > 0: oscillatory branch with nu^2; < 0: overdamped with nu^2 = -value.
    a = t / (2.0 * tau)
    if abs(nu_sq_signed) < BOUNDARY_TOL:
        return np.exp(-a) * (1.0 + a)
    nu = math.sqrt(abs(nu_sq_signed))
    if nu_sq_signed > 0:
        return np.exp(-a) * (np.cos(nu * a) + np.sin(nu * a) / nu)
    # exp(-a)[cosh(nu a) + sinh(nu a)/nu], written with decaying exponentials only
    slow = np.exp(-(1.0 - nu) * a)
    fast = np.exp(-(1.0 + nu) * a)
    return 0.5 * (1.0 + 1.0 / nu) * slow + 0.5 * (1.0 - 1.0 / nu) * fast


def memory_kernel_F(t, tau: float, convention: Literal["rtn", "literal"] = "rtn"):
    """Dephasing kernel ``F(t)``; scalar in, float out, arrays broadcast.

    ``4 tau > 1`` is the oscillating (non-Markovian) regime and ``4 tau < 1``
    the monotone (Markovian) regime.
    """
    tt = _check_kernel_args(t, tau)
    if convention == "rtn":
        out = _kernel(tt, tau, 16.0 * tau * tau - 1.0)
    elif convention == "literal":
        x = abs(1.0 - 4.0 * tau * tau)
        if 4.0 * tau == 1.0:
            raise InvalidParameter("literal kernel is undefined at 4 tau = 1")
        out = _kernel(tt, tau, x if 4.0 * tau > 1.0 else -x)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return float(out) if out.ndim == 0 else out


def flip_probability(t, tau: float):
    """``P(t) = (1 - F(t)) / 2``."""
    return (1.0 - memory_kernel_F(t, tau)) / 2.0


def decoherence_factor(t, tau: float, mu: float):
    """``gamma = (1 - mu) F^2 + mu``; multiplies two-qubit coherences."""
    if not 0.0 <= mu <= 1.0:
        raise InvalidParameter(f"mu must lie in [0, 1], got {mu!r}")
    f = memory_kernel_F(t, tau)
    return (1.0 - mu) * f * f + mu


def correlated_pauli_probabilities(p: float, mu: float) -> np.ndarray:
    """Joint Pauli weights ``P_ij = (1 - mu) P_i P_j + mu P_i delta_ij`` as a 4x4 array.

    Marginals ``(P0, P1, P2, P3) = (1 - p, 0, 0, p)``.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"p must lie in [0, 1], got {p!r}")
    if not 0.0 <= mu <= 1.0:
        raise InvalidParameter(f"mu must lie in [0, 1], got {mu!r}")
    marg = np.array([1.0 - p, 0.0, 0.0, p])
    return (1.0 - mu) * np.outer(marg, marg) + mu * np.diag(marg)


def correlated_dephasing_channel(p: float, mu: float) -> TwoQubitChannel:
    """All sixteen ``sqrt(P_ij) tau_i (x) tau_j`` terms."""
    probs = correlated_pauli_probabilities(p, mu)
    ops = tuple(math.sqrt(probs[i, j]) * np.kron(_PAULIS[i], _PAULIS[j])
                for i in range(4) for j in range(4))
    return TwoQubitChannel(ops, label=f"correlated_dephasing(p={p:g}, mu={mu:g})")


def scale_off_diagonal(rho, factor: float) -> np.ndarray:
    out = np.asarray(rho, dtype=complex) * factor
    np.fill_diagonal(out, np.diag(rho))
    return out


def correlated_dephasing(rho, t: float, tau: float, mu: float,
                         mode: Literal["paper_uniform_gamma", "kraus_exact"] = "paper_uniform_gamma"):
    """Evolve ``rho`` for time ``t`` under the correlated dephasing map.

    ``paper_uniform_gamma`` multiplies every off-diagonal entry by
    :func:`decoherence_factor`. ``kraus_exact`` applies the sixteen-term Kraus
    map, which multiplies single-qubit coherences (``|00><01|``, ``|00><10|``
    and partners) by ``F`` and two-qubit coherences (``|00><11|``,
    ``|01><10|``) by ``gamma``.
    """
    if mode == "paper_uniform_gamma":
        rho = validate_density_matrix(rho)
        return scale_off_diagonal(rho, decoherence_factor(t, tau, mu))
    if mode == "kraus_exact":
        p = float(flip_probability(t, tau))
        return apply_channel(rho, correlated_dephasing_channel(min(max(p, 0.0), 1.0), mu))
    raise ValueError(f"unknown mode {mode!r}")
