"""Cluster-expansion verification toolkit for the Blume-Emery-Griffiths model."""

from .errors import BegError, DomainError, InvariantViolation, NoRootError, ResourceError
from .lattice import ModelParams, SiteSet, SpinConfiguration

__version__ = "0.1.0"

__all__ = [
    "BegError",
    "DomainError",
    "InvariantViolation",
    "ModelParams",
    "NoRootError",
    "ResourceError",
    "SiteSet",
    "SpinConfiguration",
    "__version__",
]
