"""Separation of variables for inhomogeneous twisted gl(N) spin chains, checked numerically."""

__version__ = "0.1.0"

from .chain import ChainSpec  # noqa: E402

__all__ = ["ChainSpec", "__version__"]
