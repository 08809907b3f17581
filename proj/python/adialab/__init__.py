"""Finite-volume adiabatic and thermodynamic experiments (C++ core)."""

from ._core import (
    Interaction,
    NumericalError,
    ResourceLimitError,
    ValidationError,
    __version__,
    entropy,
    gibbs,
    ising_chain,
    kato_scan,
    list_experiments,
    load_interaction,
    local_hamiltonian,
    many_body_scan,
    model_names,
    pauli,
    pressure,
    pressure_extrapolate,
    propagate,
    relative_entropy,
    run,
    trace_distance,
    trotter_product,
    variational_scan,
    verify,
    weak_gibbs_residual,
)

__all__ = [
    "Interaction",
    "NumericalError",
    "ResourceLimitError",
    "ValidationError",
    "__version__",
    "entropy",
    "gibbs",
    "ising_chain",
    "kato_scan",
    "list_experiments",
    "load_interaction",
    "local_hamiltonian",
    "many_body_scan",
    "model_names",
    "pauli",
    "pressure",
    "pressure_extrapolate",
    "propagate",
    "relative_entropy",
    "run",
    "trace_distance",
    "trotter_product",
    "variational_scan",
    "verify",
    "weak_gibbs_residual",
]
