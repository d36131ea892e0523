"""Process tensors, superprocesses and resource monotones."""

from ._core import *  # noqa: F401,F403
from ._core import (
    CapabilityError,
    ConstraintError,
    DomainError,
    FormatError,
    LabelingError,
    NumericalError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
