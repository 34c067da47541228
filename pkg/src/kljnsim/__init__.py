"""Quasi-static KLJN cable simulator.

Lumped and exact AC analysis of a short cable between two resistors, thermal
energy budgets, and a time-domain KLJN key-exchange simulation with a
directional delay probe.
"""

from .cable import CableDerived, CableSpec, derive, preset, reference_cable
from .errors import (
    IntegrationError,
    KljnError,
    NumericalError,
    QuadratureError,
    SingularSystemError,
    UnmeasurableError,
    ValidationError,
)
from .network import Direction, End, NetworkModel, Termination, Topology, solve_phasor

__version__ = "0.1.0"

__all__ = [
    "CableDerived",
    "CableSpec",
    "Direction",
    "End",
    "IntegrationError",
    "KljnError",
    "NetworkModel",
    "NumericalError",
    "QuadratureError",
    "SingularSystemError",
    "Termination",
    "Topology",
    "UnmeasurableError",
    "ValidationError",
    "derive",
    "preset",
    "reference_cable",
    "solve_phasor",
    "__version__",
]
