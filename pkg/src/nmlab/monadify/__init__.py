from .monadify import (
    FRESH_VALUE,
    base_of,
    build_monadify,
    check_monadify_preconditions,
    check_star_inseparable,
    compile_monadicity_instance,
    fresh_value_name,
    fresh_value_of,
    separator_connective,
    witness_separators_from_theorem,
)

__all__ = [
    "FRESH_VALUE",
    "base_of",
    "build_monadify",
    "check_monadify_preconditions",
    "check_star_inseparable",
    "compile_monadicity_instance",
    "fresh_value_name",
    "fresh_value_of",
    "separator_connective",
    "witness_separators_from_theorem",
]
