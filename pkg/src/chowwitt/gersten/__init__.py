"""Truncated Gersten (Rost-Schmid) complexes on catalog schemes."""

from .complex import (GerstenComplex, HomologyReport, StabilizationResult, build, generates_homology,
                      homology, homology_at, plus_minus_split, stabilize)
from .reciprocity import random_supported_symbol, reciprocity_defect, reciprocity_terms
from .rules import CoefficientRule, aux_primes

__all__ = ["CoefficientRule", "GerstenComplex", "HomologyReport", "StabilizationResult", "aux_primes", "build",
           "generates_homology", "homology", "homology_at", "plus_minus_split", "random_supported_symbol",
           "reciprocity_defect", "reciprocity_terms", "stabilize"]
