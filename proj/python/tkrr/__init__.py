"""Truncated kernel ridge regression (TKRR) with spectrum-driven (N, lambda) selection."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ConfigError,
    DomainError,
    Error,
    InvariantError,
    IoError,
    KernelSpec,
    MeasureSpec,
    NumericalError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
