"""Exact inversion of polynomial maps ``F = Id + H`` over the rationals."""

from .abch import Budget, InversionOutcome, Status, invert, sequence
from .poly import BudgetExceeded, Poly
from .polymap import (
    NormalizedMap,
    PolynomialMap,
    SingularLinearPart,
    compose_maps,
    degree_data,
    identity_map,
    is_keller,
    jacobian_det,
    normalize,
)
from .parser import ParseError, parse_map, parse_poly

__all__ = [
    "Budget",
    "BudgetExceeded",
    "InversionOutcome",
    "NormalizedMap",
    "ParseError",
    "Poly",
    "PolynomialMap",
    "SingularLinearPart",
    "Status",
    "compose_maps",
    "degree_data",
    "identity_map",
    "invert",
    "is_keller",
    "jacobian_det",
    "normalize",
    "parse_map",
    "parse_poly",
    "sequence",
]

__version__ = "0.1.0"
