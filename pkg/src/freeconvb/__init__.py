"""Type B free probability: dual-number transforms, subordination solvers and
convolutions of pairs ``(μ, ν)`` of a law and an infinitesimal deformation."""

from .dualnum import HBAR, DualComplex
from .errors import FreeConvError
from .measures import (
    Arcsine,
    Atomic,
    CauchyBDerivative,
    CauchyLaw,
    DerivativeOfMeasure,
    DifferenceOfMeasures,
    FreePoisson,
    GridDensity,
    Semicircle,
    SemicircleBDerivative,
    SignedAtomic,
    UnitCircleAtomic,
)
from .subordination import SolverConfig, additive_omega, multiplicative_omega
from .typeb import TypeBLaw, boxplus_b, boxtimes_b, cfree_boxplus

__version__ = "0.1.0"

__all__ = [
    "HBAR",
    "DualComplex",
    "FreeConvError",
    "Arcsine",
    "Atomic",
    "CauchyBDerivative",
    "CauchyLaw",
    "DerivativeOfMeasure",
    "DifferenceOfMeasures",
    "FreePoisson",
    "GridDensity",
    "Semicircle",
    "SemicircleBDerivative",
    "SignedAtomic",
    "UnitCircleAtomic",
    "SolverConfig",
    "additive_omega",
    "multiplicative_omega",
    "TypeBLaw",
    "boxplus_b",
    "boxtimes_b",
    "cfree_boxplus",
]
