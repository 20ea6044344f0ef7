"""Finite-N Dicke model: exact diagonalization, coherent and symmetry-adapted variational states."""

__version__ = "0.1.0"

from .model import ModelParams, Parity, gamma_critical  # noqa: E402

__all__ = ["ModelParams", "Parity", "gamma_critical", "__version__"]
