"""Radial energy-critical quintic NLS workbench built on the outgoing/incoming wave split."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ConfigurationError,
    DomainError,
    InfeasibleError,
    PreconditionError,
    RadialField,
    RadialGrid,
    ResolutionError,
    SpectralField,
    TestFunctionSpec,
    make_grid,
    sample_field,
)
from .transforms import DecompositionParams, radial_fourier, inverse_radial_fourier  # noqa: E402

__all__ = [
    "__version__",
    "ConfigurationError",
    "DomainError",
    "InfeasibleError",
    "PreconditionError",
    "RadialField",
    "RadialGrid",
    "ResolutionError",
    "SpectralField",
    "TestFunctionSpec",
    "make_grid",
    "sample_field",
    "DecompositionParams",
    "radial_fourier",
    "inverse_radial_fourier",
]
