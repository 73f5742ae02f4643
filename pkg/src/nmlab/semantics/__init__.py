"""
Semantics package.

Nmatrices, their text format, and valuation-based evaluation of formulas.
"""

from .nmatrix import WILDCARD, Interpretation, Nmatrix
from .nmatrix_io import dump_nmatrix, format_nmatrix, load_nmatrix, parse_nmatrix
from .semantics import (
    Assignment,
    MultiFunction,
    check_consequence,
    consistent_assignments,
    expressed_multifunction,
    find_countermodel,
    image,
    infectious_values,
    is_consistent,
    is_deterministic,
    is_theorem,
    reduct,
    separates,
)

__all__ = [
    'WILDCARD',
    'Assignment',
    'Interpretation',
    'MultiFunction',
    'Nmatrix',
    'check_consequence',
    'consistent_assignments',
    'dump_nmatrix',
    'expressed_multifunction',
    'find_countermodel',
    'format_nmatrix',
    'image',
    'infectious_values',
    'is_consistent',
    'is_deterministic',
    'is_theorem',
    'load_nmatrix',
    'parse_nmatrix',
    'reduct',
    'separates',
]
