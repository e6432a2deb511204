"""Congruence counts, Jacobi sums and certified gaps for diagonal cubic and quartic forms."""

from ._gapforms import (
    DiagonalForm,
    IntegrityError,
    build_witness,
    check_witness,
    classify,
    count,
    count_squarefree,
    count_zero_formula,
    density,
    find_explicit_gap,
    h_term,
    jacobi_pi,
    k_term,
    max_gap,
    scan,
    sieve_values,
    window_values,
)

__all__ = [
    "DiagonalForm",
    "IntegrityError",
    "build_witness",
    "check_witness",
    "classify",
    "count",
    "count_squarefree",
    "count_zero_formula",
    "density",
    "find_explicit_gap",
    "h_term",
    "jacobi_pi",
    "k_term",
    "max_gap",
    "scan",
    "sieve_values",
    "window_values",
]
