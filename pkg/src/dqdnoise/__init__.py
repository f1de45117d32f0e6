"""Thermal entanglement and coherence of two coupled double-quantum-dot charge qubits."""

__version__ = "0.1.0"

from .core import (
    ModelParams,
    Spectrum,
    ThermalElements,
    build_hamiltonian,
    eigenvectors,
    spectrum,
    thermal_elements,
    thermal_state,
    thermal_state_numeric,
)
from .measures import (
    CoherenceValue,
    ConcurrenceBreakdown,
    concurrence_numeric,
    concurrence_paper,
    l1_coherence,
    l1_coherence_paper_eq16,
)
