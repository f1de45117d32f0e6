"""Two coupled double-quantum-dot charge qubits: Hamiltonian, spectrum, Gibbs state.

Units: hbar = k_B = 1. All of omega1, omega2, coulomb, temperature and the
energies share one arbitrary energy unit.

Basis ordering is ``|00>, |01>, |10>, |11>`` with ``|0> = |L>`` and
``|1> = |R>`` (excess electron in the left or right dot).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoltzmannOverflow, DegenerateNormalizer, InvalidParameter

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
IDENTITY_2 = np.eye(2)

# Tolerance on the imaginary part of the (real) thermal state.
_IMAG_TOL = 1e-14
# below this, 1/norm^2 overflows
_MIN_NORM = 1.0 / math.sqrt(np.finfo(float).max)


@dataclass(frozen=True)
class ModelParams:
    omega1: float
    omega2: float
    coulomb: float
    temperature: float

    def __post_init__(self):
        for name in ("omega1", "omega2", "coulomb"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameter(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.coulomb < 0:
            raise InvalidParameter(f"coulomb must be >= 0, got {self.coulomb!r}")
        if not self.temperature > 0:
            raise InvalidParameter(f"temperature must be > 0, got {self.temperature!r}")

    @property
    def beta(self) -> float:
        """Inverse temperature; ``temperature = inf`` gives 0."""
        return 1.0 / self.temperature

    def replace(self, **changes) -> "ModelParams":
        fields = dict(omega1=self.omega1, omega2=self.omega2,
                      coulomb=self.coulomb, temperature=self.temperature)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class Spectrum:
    n_minus: float
    n_plus: float
    b_minus: float
    b_plus: float
    delta_minus: float
    delta_plus: float
    e: tuple[float, float, float, float]


@dataclass(frozen=True)
class ThermalElements:
    """The six independent real entries of the symmetric thermal-state layout.

    The full matrix is::

        [[e11, e12, e13, e14],
         [e12, e22, e23, e13],
         [e13, e23, e22, e12],
         [e14, e13, e12, e11]]
    """
    e11: float
    e22: float
    e12: float
    e13: float
    e14: float
    e23: float

    NAMES = ("e11", "e22", "e12", "e13", "e14", "e23")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, n) for n in self.NAMES)

    def scaled(self, factors) -> "ThermalElements":
        """Multiply each element by a factor.

        ``factors`` is a mapping keyed by element name (missing keys mean 1), a
        ``ThermalElements`` or a 6-sequence in ``NAMES`` order.
        """
        if isinstance(factors, ThermalElements):
            fac = factors.as_tuple()
        elif isinstance(factors, dict):
            unknown = set(factors) - set(self.NAMES)
            if unknown:
                raise InvalidParameter(f"unknown element names {sorted(unknown)}")
            fac = tuple(factors.get(n, 1.0) for n in self.NAMES)
        else:
            fac = tuple(factors)
            if len(fac) != 6:
                raise InvalidParameter("need six scale factors")
        return ThermalElements(*(v * f for v, f in zip(self.as_tuple(), fac)))

    def to_matrix(self) -> np.ndarray:
        a, b, c, d, e, f = (self.e11, self.e22, self.e12, self.e13, self.e14, self.e23)
        return np.array([
            [a, c, d, e],
            [c, b, f, d],
            [d, f, b, c],
            [e, d, c, a],
        ], dtype=complex)

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "ThermalElements":
        """Read the six layout positions of ``rho`` (real parts).

        No check is made that ``rho`` actually has the symmetric layout.
        """
        r = np.real(np.asarray(rho))
        return cls(e11=r[0, 0], e22=r[1, 1], e12=r[0, 1],
                   e13=r[0, 2], e14=r[0, 3], e23=r[1, 2])


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Return ``omega1 X(x)I + omega2 I(x)X + V Z(x)Z`` as a real 4x4 array."""
    return (params.omega1 * np.kron(SIGMA_X, IDENTITY_2)
            + params.omega2 * np.kron(IDENTITY_2, SIGMA_X)
            + params.coulomb * np.kron(SIGMA_Z, SIGMA_Z))


def spectrum(params: ModelParams) -> Spectrum:
    """Closed-form eigenvalues and eigenvector normalizers.

    Sign pairing: ``E1 = +sqrt(N-^2 + V^2)``, ``E2 = -E1``,
    ``E3 = +sqrt(N+^2 + V^2)``, ``E4 = -E3``. This is the pairing under which
    the closed-form eigenvectors satisfy ``H phi_i = E_i phi_i``.

    Raises
    ------
    DegenerateNormalizer
        If ``N^2 + B^2`` vanishes for either sector (V = 0 and omega1 = +-omega2).
    """
    v = params.coulomb
    n_minus = params.omega1 - params.omega2
    n_plus = params.omega1 + params.omega2
    r_minus = math.hypot(n_minus, v)
    r_plus = math.hypot(n_plus, v)
    b_minus = v + r_minus
    b_plus = v + r_plus

    deltas = []
    for label, n, b in (("-", n_minus, b_minus), ("+", n_plus, b_plus)):
        norm = math.sqrt(2.0) * math.hypot(n, b)
        # delta^2 enters the thermal elements, so it must stay finite too
        if not norm > _MIN_NORM:
            raise DegenerateNormalizer(
                f"N{label}^2 + B{label}^2 = 0 (coulomb={v}, N{label}={n}); "
                "closed-form eigenvectors undefined, use the numeric path")
        deltas.append(1.0 / norm)

    return Spectrum(
        n_minus=n_minus, n_plus=n_plus, b_minus=b_minus, b_plus=b_plus,
        delta_minus=deltas[0], delta_plus=deltas[1],
        e=(r_minus, -r_minus, r_plus, -r_plus),
    )


def eigenvectors(params: ModelParams) -> np.ndarray:
    """Closed-form normalized eigenvectors; column ``i`` pairs with ``spectrum(params).e[i]``."""
    sp = spectrum(params)
    dm, dp = sp.delta_minus, sp.delta_plus
    bm, nm, bp, np_ = sp.b_minus, sp.n_minus, sp.b_plus, sp.n_plus
    phi1 = dm * np.array([-bm, nm, -nm, bm])
    phi2 = dm * np.array([-nm, -bm, bm, nm])
    phi3 = dp * np.array([bp, np_, np_, bp])
    phi4 = dp * np.array([np_, -bp, -bp, np_])
    return np.column_stack([phi1, phi2, phi3, phi4])


def boltzmann_weights(energies, beta: float) -> np.ndarray:
    """Normalized Boltzmann weights, shifted by the minimum energy so nothing overflows."""
    e = np.asarray(energies, dtype=float)
    if beta == 0.0:
        return np.full(e.shape, 1.0 / e.size)
    with np.errstate(invalid="ignore", over="ignore"):
        exponent = -beta * (e - e.min())
    if not np.all(np.isfinite(exponent)):
        raise BoltzmannOverflow(f"beta*(E - E_min) not finite for beta={beta!r}")
    w = np.exp(exponent)
    return w / w.sum()


def thermal_elements(params: ModelParams) -> ThermalElements:
    """Closed-form thermal-state elements built from the analytic spectrum."""
    sp = spectrum(params)
    w1, w2, w3, w4 = boltzmann_weights(sp.e, params.beta)
    dm2 = sp.delta_minus ** 2
    dp2 = sp.delta_plus ** 2
    bm, nm, bp, np_ = sp.b_minus, sp.n_minus, sp.b_plus, sp.n_plus

    minus_a = dm2 * (bm * bm * w1 + nm * nm * w2)
    minus_b = dm2 * (nm * nm * w1 + bm * bm * w2)
    plus_a = dp2 * (bp * bp * w3 + np_ * np_ * w4)
    plus_b = dp2 * (np_ * np_ * w3 + bp * bp * w4)
    cross_minus = bm * nm * dm2 * (w1 - w2)
    cross_plus = bp * np_ * dp2 * (w3 - w4)

    return ThermalElements(
        e11=minus_a + plus_a,
        e22=minus_b + plus_b,
        e12=-cross_minus + cross_plus,
        e13=cross_minus + cross_plus,
        e14=-minus_a + plus_a,
        e23=-minus_b + plus_b,
    )


def thermal_state_numeric(params: ModelParams) -> np.ndarray:
    """Gibbs state from a dense eigendecomposition of the Hamiltonian."""
    energies, vecs = np.linalg.eigh(build_hamiltonian(params))
    w = boltzmann_weights(energies, params.beta)
    rho = (vecs * w) @ vecs.T
    return ((rho + rho.T) / 2).astype(complex)


def thermal_state_closed_form(params: ModelParams) -> np.ndarray:
    rho = thermal_elements(params).to_matrix()
    assert np.max(np.abs(rho.imag)) < _IMAG_TOL
    return rho


def thermal_state(params: ModelParams) -> np.ndarray:
    """Gibbs state ``exp(-beta H) / Z`` as a complex 4x4 array.

    Uses the closed-form elements and falls back to the eigendecomposition
    when the closed-form normalizers are singular.
    """
    try:
        return thermal_state_closed_form(params)
    except DegenerateNormalizer:
        return thermal_state_numeric(params)
