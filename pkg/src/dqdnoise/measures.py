"""Concurrence and l1-norm coherence.

Each quantity has an authoritative route working on any two-qubit density
matrix and a closed-form route working on the six symmetric-layout elements
(:class:`~dqdnoise.core.ThermalElements`). The closed-form routes reproduce
closed-form expressions as written, including their apparent defects, so that
sweeps can report how far they are from the authoritative values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import SIGMA_Y, ThermalElements
from .errors import ComplexEigenvalue, NotAState
from .states import validate_density_matrix

YY = np.real(np.kron(SIGMA_Y, SIGMA_Y))

# R-matrix eigenvalues in [-NOISE_CLAMP, 0) are treated as zero.
NOISE_CLAMP = 1e-10
# Closed-form eigenvalues below -PAPER_NEG_TOL are reported as complex/invalid.
PAPER_NEG_TOL = 1e-9
# Eigenvalues of rho at or below this are rounding noise and dropped before
# factorizing R; keeping them turns eps-sized noise into sqrt(eps)-sized
# concurrence errors.
_RANK_FLOOR = 16 * np.finfo(float).eps


@dataclass(frozen=True)
class ConcurrenceBreakdown:
    value: float
    sqrt_eigs: tuple[float, float, float, float]
    method: Literal["numeric_wootters", "paper_analytic"]


@dataclass(frozen=True)
class CoherenceValue:
    value: float
    method: Literal["l1_definition", "paper_eq16"]


def r_matrix(rho) -> np.ndarray:
    """``rho (Y(x)Y) rho* (Y(x)Y)``."""
    rho = np.asarray(rho, dtype=complex)
    return rho @ YY @ rho.conj() @ YY


def _clamp_noise(lam: np.ndarray) -> np.ndarray:
    if np.any(lam < -NOISE_CLAMP):
        raise NotAState(f"R-matrix eigenvalue {lam.min():.3e} is negative beyond noise")
    return np.where(lam < 0.0, 0.0, lam)


def _sqrt_eigs_direct(rho: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvals(r_matrix(rho)).real
    return np.sqrt(_clamp_noise(np.sort(lam)[::-1]))


def _sqrt_eigs_factorized(rho: np.ndarray) -> np.ndarray:
    # rho = V V^dag with V = U sqrt(p); eig(R) = eig(tau^dag tau) with
    # tau = V^T (Y(x)Y) V, so sqrt-eigenvalues of R are the singular values of tau.
    p, u = np.linalg.eigh((rho + rho.conj().T) / 2)
    p = np.where(p > _RANK_FLOOR, p, 0.0)
    v = u * np.sqrt(p)
    tau = v.T @ YY @ v
    return np.linalg.svd(tau, compute_uv=False)


def concurrence_numeric(rho, method: Literal["factorized", "direct"] = "factorized") -> ConcurrenceBreakdown:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)`` with ``l`` descending.

    ``l_i`` are square roots of the eigenvalues of :func:`r_matrix`.

    Parameters
    ----------
    rho : array_like
        Two-qubit density matrix in the computational basis.
    method : {"factorized", "direct"}
        ``"factorized"`` (default) gets the eigenvalues of R from the singular
        values of the Wootters matrix built on a rank-truncated
        eigendecomposition of ``rho``; accurate near pure states.
        ``"direct"`` calls a general eigensolver on R itself, clamping
        eigenvalues in ``[-1e-10, 0)`` to zero.

    Raises
    ------
    NotAState
        If ``rho`` is not a valid state, or (direct method) R has an
        eigenvalue below ``-1e-10``.
    """
    rho = validate_density_matrix(rho)
    if method == "factorized":
        lam = _sqrt_eigs_factorized(rho)
    elif method == "direct":
        lam = _sqrt_eigs_direct(rho)
    else:
        raise ValueError(f"unknown method {method!r}")
    lam = np.sort(lam)[::-1]
    value = max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
    return ConcurrenceBreakdown(value=value, sqrt_eigs=tuple(float(x) for x in lam),
                                method="numeric_wootters")


def paper_auxiliaries(el: ThermalElements) -> dict[str, float]:
    """Xi, Lambda and Gamma (both signs) from the six layout elements."""
    e11, e22, e12, e13, e14, e23 = el.as_tuple()
    out = {}
    for tag, sg in (("plus", 1.0), ("minus", -1.0)):
        out[f"xi_{tag}"] = (e11 + sg * e14) ** 2 - (e22 + sg * e23) ** 2
        out[f"lambda_{tag}"] = 2.0 * (e13 + sg * e14) * (-sg * e11 - e14 + e23 + sg * e22)
        out[f"gamma_{tag}"] = ((e11 + sg * e14) ** 2 - 4.0 * (e12 + sg * e13) ** 2
                               + (e22 + sg * e23) ** 2)
    return out


def paper_upsilons(el: ThermalElements) -> tuple[float, float, float, float]:
    """Closed-form R eigenvalues ``(u1, u2, u3, u4)`` in the labelling the closed form assigns.

    Raises :class:`ComplexEigenvalue` when a radicand or an eigenvalue is
    negative beyond ``1e-9``.
    """
    aux = paper_auxiliaries(el)
    ups = []
    for tag in ("minus", "plus"):
        radicand = aux[f"xi_{tag}"] ** 2 - aux[f"lambda_{tag}"] ** 2
        if radicand < -PAPER_NEG_TOL:
            raise ComplexEigenvalue(f"Xi_{tag}^2 - Lambda_{tag}^2 = {radicand:.3e} < 0")
        root = 0.5 * math.sqrt(max(radicand, 0.0))
        g2 = aux[f"gamma_{tag}"] ** 2
        ups += [g2 + root, g2 - root]
    for i, u in enumerate(ups, start=1):
        if u < -PAPER_NEG_TOL:
            raise ComplexEigenvalue(f"upsilon_{i} = {u:.3e} < 0")
    return tuple(max(u, 0.0) for u in ups)


def concurrence_paper(elements: ThermalElements, scale=None) -> ConcurrenceBreakdown:
    """Closed-form concurrence ``max(0, |s1 - s3| - s2 - s4)``, ``s_i = sqrt(u_i)``.

    ``scale`` optionally multiplies the elements first (see
    :meth:`ThermalElements.scaled`), e.g. a decoherence factor on the
    off-diagonals. The labels of :func:`paper_upsilons` are used as given;
    ``sqrt_eigs`` is reported sorted.
    """
    el = elements if scale is None else elements.scaled(scale)
    s1, s2, s3, s4 = (math.sqrt(u) for u in paper_upsilons(el))
    value = max(0.0, abs(s1 - s3) - s2 - s4)
    return ConcurrenceBreakdown(value=value,
                                sqrt_eigs=tuple(sorted((s1, s2, s3, s4), reverse=True)),
                                method="paper_analytic")


def l1_coherence(rho) -> CoherenceValue:
    """Sum of ``|rho_ij|`` over all twelve off-diagonal entries."""
    rho = validate_density_matrix(rho)
    a = np.abs(rho)
    return CoherenceValue(value=float(a.sum() - np.trace(a)), method="l1_definition")


def l1_coherence_paper_eq16(elements: ThermalElements) -> CoherenceValue:
    """Closed form ``4(|e12| + |e13| + |e23| + |e14|)``.

    For the symmetric layout the off-diagonal sum is really
    ``4|e12| + 4|e13| + 2|e14| + 2|e23|``; this form double-counts the last two.
    """
    e = elements
    value = 2.0 * (2.0 * (abs(e.e12) + abs(e.e13)) + 2.0 * (abs(e.e23) + abs(e.e14)))
    return CoherenceValue(value=value, method="paper_eq16")


def l1_layout_identity(elements: ThermalElements) -> float:
    """Off-diagonal l1 sum of the symmetric layout, counted entry by entry."""
    e = elements
    return 4 * abs(e.e12) + 4 * abs(e.e13) + 2 * abs(e.e14) + 2 * abs(e.e23)
