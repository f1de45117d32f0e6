"""Noise channels: generic Kraus maps, AD/PF/PD families, correlated telegraph dephasing."""
from .dephasing import (
    MemoryParams,
    correlated_dephasing,
    correlated_dephasing_channel,
    correlated_pauli_probabilities,
    decoherence_factor,
    flip_probability,
    memory_kernel_F,
    scale_off_diagonal,
)
from .kraus import (
    CHANNEL_KINDS,
    ChannelFamily,
    TableComparison,
    TwoQubitChannel,
    apply_channel,
    canonical_kind,
    identity_channel,
    make_channel,
    paper_element_tables,
    product_channel,
    s_from_time,
    single_qubit_kraus,
    table_elements,
)
from .telegraph import KernelEstimate, rtn_monte_carlo_kernel

__all__ = [
    "CHANNEL_KINDS", "ChannelFamily", "KernelEstimate", "MemoryParams", "TableComparison",
    "TwoQubitChannel", "apply_channel", "canonical_kind", "correlated_dephasing",
    "correlated_dephasing_channel", "correlated_pauli_probabilities", "decoherence_factor",
    "flip_probability", "identity_channel", "make_channel", "memory_kernel_F",
    "paper_element_tables", "product_channel", "rtn_monte_carlo_kernel", "s_from_time",
    "scale_off_diagonal", "single_qubit_kraus", "table_elements",
]
