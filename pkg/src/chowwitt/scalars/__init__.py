"""Exact scalars: catalog fields, polynomials, factorization, valuations."""

from .fields import (QQ, GF, ExtensionField, Field, FieldElement, FiniteField, PrimeField,
                     RationalFunctionField, Rationals, conway_polynomial, is_prime)
from .poly import Poly
from .factor import factor, is_irreducible, monic_irreducibles, squarefree_decomposition
