"""Exact algebra of central hyperplane arrangements.

Gröbner bases, minimal graded free resolutions, logarithmic derivations,
the free / plus-one generated classification and associated primes of
S/J(A), all over the rationals.
"""

__version__ = "0.1.0"

from .algebra import FreeModule, ModuleElement, ParseError, Poly, Ring
from .arrangement import Arrangement, ArrangementError, Flat, IntersectionLattice, LinearForm, cone, load
from .assprimes import AssociatedPrimes, associated_primes, candidate_flats, cross_validate_ass, is_associated_oracle
from .classify import (
    Classification,
    Derivation,
    PreconditionError,
    classify,
    derivation_module,
    euler_field,
    is_logarithmic,
    saito_check,
    verify_addition_theorem,
    verify_deletion_theorem,
)
from .groebner import buchberger, is_groebner, normal_form
from .ideals import Ideal
from .resolution import BettiTable, GradedResolution, free_resolution, minimalize

__all__ = [
    "Arrangement",
    "ArrangementError",
    "AssociatedPrimes",
    "BettiTable",
    "Classification",
    "Derivation",
    "Flat",
    "FreeModule",
    "GradedResolution",
    "Ideal",
    "IntersectionLattice",
    "LinearForm",
    "ModuleElement",
    "ParseError",
    "Poly",
    "PreconditionError",
    "Ring",
    "associated_primes",
    "buchberger",
    "candidate_flats",
    "classify",
    "cone",
    "cross_validate_ass",
    "derivation_module",
    "euler_field",
    "free_resolution",
    "is_associated_oracle",
    "is_groebner",
    "is_logarithmic",
    "load",
    "minimalize",
    "normal_form",
    "saito_check",
    "verify_addition_theorem",
    "verify_deletion_theorem",
]
