"""Numerical toolkit for the fractional heat operator (d/dt - Lap)^s."""

from ._core import (
    ConfigError,
    Grid,
    NumericalError,
    __version__,
    apply_operator,
    consistency,
    extend_pde,
    generate,
    harnack_experiment,
    kernel_mass,
)

__all__ = [
    "ConfigError",
    "Grid",
    "NumericalError",
    "__version__",
    "apply_operator",
    "consistency",
    "extend_pde",
    "generate",
    "harnack_experiment",
    "kernel_mass",
]
