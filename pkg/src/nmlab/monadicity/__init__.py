from .monadicity import (
    CoverageReport,
    SeparatorReport,
    UnaryClone,
    Verdict,
    decide_monadicity_matrix,
    distinct_pairs,
    enumerate_monadic_formulas,
    fresh_variable,
    monadic_strata,
    search_separators,
    unary_clone,
    verify_separator_set,
)

__all__ = [
    "CoverageReport",
    "SeparatorReport",
    "UnaryClone",
    "Verdict",
    "decide_monadicity_matrix",
    "distinct_pairs",
    "enumerate_monadic_formulas",
    "fresh_variable",
    "monadic_strata",
    "search_separators",
    "unary_clone",
    "verify_separator_set",
]
