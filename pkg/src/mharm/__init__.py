"""Harmonic analysis on the planar motion group M(2).

Functions on M(2) are stored as stacks of angular modes ``f_m(x)`` sampled on a
square grid; every transform in the package acts mode by mode on those
stacks.
"""

from mharm.errors import (
    AliasingError,
    DomainError,
    ExtensionDomainError,
    InadmissibleWeightError,
    InvalidSpecError,
    MharmError,
    NonInvertibleSymbolError,
    NotInRangeError,
    PreconditionError,
)
from mharm.group import ComplexGroupPoint, GroupElement, act_complex, compose, embed_matrix, inverse
from mharm.modes import GridSpec, ModeStack, SpectralStack
from mharm.report import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "ComplexGroupPoint",
    "DomainError",
    "ExtensionDomainError",
    "GridSpec",
    "GroupElement",
    "InadmissibleWeightError",
    "InvalidSpecError",
    "MharmError",
    "ModeStack",
    "NonInvertibleSymbolError",
    "NotInRangeError",
    "PreconditionError",
    "SpectralStack",
    "VerificationReport",
    "act_complex",
    "compose",
    "embed_matrix",
    "inverse",
]
