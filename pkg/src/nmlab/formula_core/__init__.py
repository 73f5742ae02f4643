"""
Formula core package.

Signatures, formula terms, the canonical text form and subformula DAGs.
"""

from .formula_core import (
    Application,
    Formula,
    Signature,
    SubformulaDag,
    Variable,
    format_formula,
    format_formula_infix,
    formula_size,
    ordered_variables,
    parse_formula,
    subformula_dag,
    substitute,
    variables,
)

__all__ = [
    'Application',
    'Formula',
    'Signature',
    'SubformulaDag',
    'Variable',
    'format_formula',
    'format_formula_infix',
    'formula_size',
    'ordered_variables',
    'parse_formula',
    'subformula_dag',
    'substitute',
    'variables',
]
