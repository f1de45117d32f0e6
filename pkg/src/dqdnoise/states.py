"""Density-matrix checks and a few reference states."""
from __future__ import annotations

import numpy as np

from .errors import NotAState

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def state_defects(rho) -> dict[str, float]:
    """Hermiticity, trace and positivity defects of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace = float(abs(np.trace(rho) - 1.0))
    lam_min = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
    return {"hermiticity": herm, "trace": trace, "min_eigenvalue": lam_min}


def validate_density_matrix(rho) -> np.ndarray:
    """Return ``rho`` as a complex 4x4 array or raise :class:`NotAState`."""
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (4, 4):
        raise NotAState(f"expected a 4x4 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotAState("matrix has non-finite entries")
    d = state_defects(arr)
    if d["hermiticity"] > HERMITIAN_TOL:
        raise NotAState(f"not Hermitian (max |rho - rho^dag| = {d['hermiticity']:.3e})")
    if d["trace"] > TRACE_TOL:
        raise NotAState(f"trace deviates from 1 by {d['trace']:.3e}")
    if d["min_eigenvalue"] < -PSD_TOL:
        raise NotAState(f"not positive semidefinite (lambda_min = {d['min_eigenvalue']:.3e})")
    return arr


def is_density_matrix(rho) -> bool:
    try:
        validate_density_matrix(rho)
    except NotAState:
        return False
    return True


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bell_phi_plus() -> np.ndarray:
    return pure_state([1, 0, 0, 1])


def maximally_mixed() -> np.ndarray:
    return np.eye(4, dtype=complex) / 4


def random_pure_state(rng: np.random.Generator) -> np.ndarray:
    """Normalized complex Gaussian 4-vector."""
    return rng.normal(size=4) + 1j * rng.normal(size=4)


def random_density_matrix(rng: np.random.Generator, rank: int = 4) -> np.ndarray:
    """Wishart-type mixed state ``G G^dag / tr`` with ``G`` complex Gaussian 4 x rank."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``U (x) V`` built from QR of complex Gaussian 2x2 blocks."""
    def haar2():
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))
    return np.kron(haar2(), haar2())
