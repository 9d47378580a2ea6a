"""Semiclassical density matrix near the top of an anharmonic barrier."""

from .model import (BarrierParams, DomainError, Endpoints, NumericalFailure, ThermoPoint, lambda1_from_theta,
                    scaled_potential, theta_from_lambda1, validate)

__version__ = "0.1.0"

__all__ = [
    "BarrierParams", "DomainError", "Endpoints", "NumericalFailure", "ThermoPoint", "lambda1_from_theta",
    "scaled_potential", "theta_from_lambda1", "validate", "__version__",
]
