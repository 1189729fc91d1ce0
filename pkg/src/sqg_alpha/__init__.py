"""Pseudo-spectral solver for the inviscid alpha-regularized SQG equations."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    DataIntegrityError,
    InsufficientDataError,
    NumericalOverflowError,
)
from .spectral import Grid, PhysicalField, SpectralField, make_grid  # noqa: E402
from .model import ModelParams, State, rhs, state_from_theta  # noqa: E402
from .timestepper import IntegratorConfig, integrate, rk4_step  # noqa: E402
from .diagnostics import DiagnosticsRecord, record  # noqa: E402

__all__ = [
    "ConfigurationError", "DataIntegrityError", "InsufficientDataError",
    "NumericalOverflowError", "Grid", "PhysicalField", "SpectralField", "make_grid",
    "ModelParams", "State", "rhs", "state_from_theta", "IntegratorConfig", "integrate",
    "rk4_step", "DiagnosticsRecord", "record",
]
