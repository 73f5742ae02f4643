"""
Monadification M -> M_m.

M_m adds a fresh value ``one`` (the only designated value) and a binary
connective ``f_<a>`` for every value a of M. Base connectives keep their
tables on base values and return every value of M_m as soon as ``one`` is an
input. When M has an infectious undesignated value, M_m is monadic exactly
when M has a theorem, and ``{p} + {f_a(p, phi)}`` separates M_m for any
theorem phi of M.
"""

import logging
import re
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

from nmlab.errors import MonadifyError
from nmlab.formula_core import Application, Formula, subformula_dag
from nmlab.machine import CounterMachine
from nmlab.monadicity import fresh_variable
from nmlab.reduction import build_nmatrix, search_theorems
from nmlab.semantics import WILDCARD, Interpretation, Nmatrix, infectious_values, is_theorem

logger = logging.getLogger(__name__)

FRESH_VALUE = "one"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def fresh_value_name(values: Sequence[str]) -> str:
    """``one``, with ``_1`` appended until it is not a value of the base."""
    name = FRESH_VALUE
    taken = set(values)
    while name in taken:
        name += "_1"
    return name


def separator_connective(value: str) -> str:
    return f"f_{value}"


def build_monadify(nmatrix: Nmatrix) -> Nmatrix:
    """
    Build M_m from ``nmatrix``.

    The f_a tables read the designated set of the base: (f_a)(x, y) is
    {one} when x = a and y is designated in M, every base value when x is
    another base value and y is designated in M, and every value otherwise.

    Raises:
        MonadifyError: If some f_<a> name is not a valid connective name or
            clashes with a base connective.
    """
    base = nmatrix.values
    fresh = fresh_value_name(base)
    values = base + (fresh,)
    everything = frozenset(values)
    base_set = frozenset(base)
    interpretations: Dict[str, Interpretation] = {}

    for conn, interp in nmatrix.interpretations.items():
        k = interp.arity
        rows: List = list(interp.explicit_rows)
        for i in range(k):
            pattern = tuple(fresh if j == i else WILDCARD for j in range(k))
            rows.append((pattern, everything))
        rows.extend(interp.wildcard_rows)
        interpretations[conn] = Interpretation(k, rows)

    designated = nmatrix.sorted_values(nmatrix.designated)
    for a in base:
        conn = separator_connective(a)
        if not _IDENT.match(conn):
            raise MonadifyError(f"Value '{a}' gives the invalid connective name '{conn}'")
        if conn in interpretations:
            raise MonadifyError(f"Connective '{conn}' already exists in {nmatrix.name}")
        rows = []
        for x in base:
            cell = frozenset({fresh}) if x == a else base_set
            rows.extend(((x, d), cell) for d in designated)
        rows.append(((WILDCARD, WILDCARD), everything))
        interpretations[conn] = Interpretation(2, rows)

    monadified = Nmatrix(values, [fresh], interpretations, name=f"{nmatrix.name}_m")
    logger.info(f"Monadified {nmatrix.name}: {len(values)} values, {len(interpretations)} connectives "
                f"(fresh value '{fresh}')")
    return monadified


def fresh_value_of(monadified: Nmatrix) -> str:
    """The value build_monadify added: the last one, and the only designated one."""
    return monadified.values[-1]


def check_monadify_preconditions(nmatrix: Nmatrix) -> bool:
    """True iff M has two or more values and an infectious undesignated value."""
    if len(nmatrix.values) < 2:
        return False
    return bool(infectious_values(nmatrix) - nmatrix.designated)


def witness_separators_from_theorem(nmatrix: Nmatrix, theorem: Formula) -> List[Formula]:
    """
    Separators of M_m built from a theorem of M.

    Returns:
        ``[p] + [f_a(p, theorem) for a in values of M]``.

    Raises:
        MonadifyError: If ``theorem`` has variables or is not a theorem of M.
    """
    names = [var.name for var in subformula_dag(theorem).variables]
    if names:
        raise MonadifyError(f"Expected a closed formula, found variables {names}")
    if not is_theorem(nmatrix, theorem):
        raise MonadifyError(f"{theorem.text} is not a theorem of {nmatrix.name}")
    signature = nmatrix.signature.extend((separator_connective(a), 2) for a in nmatrix.values)
    p = fresh_variable(signature)
    return [p] + [Application(separator_connective(a), (p, theorem)) for a in nmatrix.values]


@lru_cache(maxsize=8)
def compile_monadicity_instance(machine: CounterMachine) -> Nmatrix:
    """(M_C)_m: monadic iff ``machine`` halts."""
    return build_monadify(build_nmatrix(machine))


def base_of(monadified: Nmatrix) -> Nmatrix:
    """
    Recover M from M_m.

    Drops the fresh value, the f_<a> connectives and every row that mentions
    the fresh value; the designated set of M is read off the f_<a> tables.
    """
    fresh = fresh_value_of(monadified)
    base = monadified.values[:-1]
    if not base:
        raise MonadifyError(f"{monadified.name} has no base values")
    first_separator = separator_connective(base[0])
    if first_separator not in monadified.interpretations:
        raise MonadifyError(f"{monadified.name} was not built by build_monadify")
    separators = {separator_connective(a) for a in base}
    designated = [d for d in base if monadified.cell(first_separator, (base[0], d)) == {fresh}]
    interpretations = {
        conn: Interpretation(interp.arity, [(pattern, cell) for pattern, cell in interp.rows()
                                            if fresh not in pattern])
        for conn, interp in monadified.interpretations.items() if conn not in separators
    }
    name = monadified.name[:-2] if monadified.name.endswith("_m") else f"{monadified.name}-base"
    return Nmatrix(base, designated, interpretations, name=name)


def check_star_inseparable(monadified: Nmatrix, star: str, max_subformulas: int) -> Optional[Formula]:
    """
    Look for a monadic formula of M_m separating ``star`` from a base value.

    ``star`` must be infectious and undesignated in M. Every formula of M_m
    with at most ``max_subformulas`` distinct subformulas is covered without
    listing them:

    - a subformula that can take the fresh value lets every formula above it
      take every value, so it never occurs in a separator;
    - below that, a subformula containing p can take ``star`` at ``star``,
      and only f_<a> can return nothing but the fresh value;
    - so a separator is f_<a>(x, y) with y a closed M-formula whose values are
      all designated in M, i.e. a theorem of M, and x containing p.

    The search is therefore the theorem search of M with two subformulas
    fewer, and a theorem theta gives the separator f_<star>(p, theta).

    Args:
        monadified: An Nmatrix built by build_monadify.
        star: An infectious undesignated value of M.
        max_subformulas: Bound on the distinct subformulas of the separator.

    Returns:
        The separator f_<star>(p, theta) for the first theorem theta found,
        or None when no formula within the bound separates ``star``.

    Raises:
        MonadifyError: If ``star`` is not an infectious undesignated value of M.
    """
    base = base_of(monadified)
    if star not in base.index:
        raise MonadifyError(f"'{star}' is not a value of {base.name}")
    if star in base.designated or star not in infectious_values(base):
        raise MonadifyError(f"'{star}' is not an infectious undesignated value of {base.name}")
    bound = max_subformulas - 2
    if bound < 1:
        logger.info(f"No formula with at most {max_subformulas} distinct subformulas separates '{star}'")
        return None
    report = search_theorems(base, bound)
    if not report.theorems:
        logger.info(f"No formula with at most {max_subformulas} distinct subformulas separates '{star}' "
                    f"({base.name} has no theorem with at most {bound})")
        return None
    variable = fresh_variable(monadified.signature)
    separator = Application(separator_connective(star), (variable, report.theorems[0]))
    logger.info(f"{separator.text} separates '{star}' from every other base value")
    return separator
