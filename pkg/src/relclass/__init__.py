"""Class-group rank bounds from ramification, and field-counting statistics."""
from .core_arith import Factorization, PrimeTable, ResidueRule, factorize, is_prime, sieve_primes
from .errors import (BoundsError, ConfigError, ConsistencyError, DomainError, FitError, ModeError,
                     RelclassError, SizeError, StructureError, UnsupportedError)
from .finabelian import FiniteAbelianGroup, hom_count, power_subgroup, rank_p
from .invariant_bound import count_divisible, invariant_quotient, profile, rank_lower_bound
from .kernels import BACKEND
from .quadforms import QForm, QuadDisc, class_group

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundsError", "ConfigError", "ConsistencyError", "DomainError", "Factorization",
    "FiniteAbelianGroup", "FitError", "ModeError", "PrimeTable", "QForm", "QuadDisc", "RelclassError",
    "ResidueRule", "SizeError", "StructureError", "UnsupportedError", "class_group", "count_divisible",
    "factorize", "hom_count", "invariant_quotient", "is_prime", "power_subgroup", "profile",
    "rank_lower_bound", "rank_p", "sieve_primes",
]
