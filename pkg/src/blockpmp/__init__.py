"""Exact and simulated probabilities that random block projections preserve
the minimal polynomial of a matrix over a finite field."""

from .exactprob import (
    ExactProb,
    comparison_bounds,
    count_irreducibles,
    pmp_exact,
    pmp_single_block,
    pmpmin_approx,
    pmpmin_exact,
    pmpmin_log,
    rank_distribution,
    worst_profile,
)
from .finitefield import PrimeField
from .jordan import ElementaryDivisorSpec, build, spec_minpoly, spec_of
from .montecarlo import estimate_pmp, exhaustive_pmp
from .polynomials import Poly, berlekamp_massey, parse_poly

__version__ = "0.1.0"
