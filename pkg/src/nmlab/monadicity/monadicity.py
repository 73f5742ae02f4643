"""
Monadicity of (N)matrices.

For deterministic matrices the set of expressible unary functions is finite
and can be generated to a fixpoint, which decides monadicity exactly. For
genuine Nmatrices a formula cannot be replaced by the function it expresses,
so separators are searched formula by formula, by increasing node count, up
to a budget. That search answers MONADIC or UNKNOWN, never NOT_MONADIC.
"""

import logging
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from nmlab.errors import NmlabError, NotDeterministicError
from nmlab.formula_core import Application, Formula, Signature, Variable, subformula_dag
from nmlab.semantics import MultiFunction, Nmatrix, expressed_multifunction

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


class Verdict(Enum):
    MONADIC = "MONADIC"
    NOT_MONADIC = "NOT_MONADIC"
    UNKNOWN = "UNKNOWN"


@dataclass
class SeparatorReport:
    """
    Outcome of a monadicity decision or search.

    ``witnesses`` maps each covered pair (in value order) to the first
    formula found separating it. ``certified`` is True only when the verdict
    comes from a complete clone fixpoint.
    """

    verdict: Verdict
    witnesses: Dict[Pair, Formula] = field(default_factory=dict)
    uncovered: Tuple[Pair, ...] = ()
    budget: Optional[int] = None
    formulas_enumerated: int = 0
    certified: bool = False

    @property
    def separators(self) -> List[Formula]:
        """Distinct witness formulas ordered by size, then text."""
        return sorted(set(self.witnesses.values()), key=lambda f: (f.size, f.text))


@dataclass
class UnaryClone:
    """
    Expressible unary functions of a deterministic matrix.

    Functions are tuples of outputs listed in the matrix's value order.
    """

    values: Tuple[str, ...]
    functions: Dict[Tuple[str, ...], Formula]
    rounds: int
    variable: Variable

    def __len__(self) -> int:
        return len(self.functions)

    def __contains__(self, function: Tuple[str, ...]) -> bool:
        return tuple(function) in self.functions

    def witness(self, function: Tuple[str, ...]) -> Formula:
        return self.functions[tuple(function)]


@dataclass
class CoverageReport:
    ok: bool
    coverage: Dict[Pair, Formula]
    uncovered: Tuple[Pair, ...]


def fresh_variable(signature: Signature, base: str = "p") -> Variable:
    """``base``, or ``base_1``, ``base_2``... when ``base`` is a connective."""
    name, counter = base, 0
    while name in signature:
        counter += 1
        name = f"{base}_{counter}"
    return Variable(name)


def distinct_pairs(nmatrix: Nmatrix) -> List[Pair]:
    return list(combinations(nmatrix.values, 2))


def _key(formula: Formula) -> Tuple[int, str]:
    return formula.size, formula.text


def unary_clone(nmatrix: Nmatrix) -> UnaryClone:
    """
    Generate every unary function expressible in a deterministic matrix.

    Starts from the identity and the nullary constants and applies every
    connective to every tuple of functions found so far until nothing new
    appears. Each function keeps the smallest witness formula found.

    Raises:
        NotDeterministicError: If some cell has more than one value.
    """
    if not nmatrix.is_deterministic():
        raise NotDeterministicError(
            f"{nmatrix.name} is not deterministic; unary functions cannot be composed")
    values = nmatrix.values
    p = fresh_variable(nmatrix.signature)
    functions: Dict[Tuple[str, ...], Formula] = {values: p}
    connectives = [(conn, interp.arity) for conn, interp in nmatrix.interpretations.items()]
    for conn, arity in connectives:
        if arity == 0:
            (constant,) = nmatrix.cell(conn, ())
            _offer(functions, (constant,) * len(values), Application(conn))

    rounds = 0
    previous: set = set()
    while True:
        rounds += 1
        snapshot = list(functions.items())
        found: Dict[Tuple[str, ...], Formula] = {}
        for conn, arity in connectives:
            if arity == 0:
                continue
            for combo in product(snapshot, repeat=arity):
                if all(fn in previous for fn, _ in combo):
                    continue
                outputs = tuple(
                    next(iter(nmatrix.cell(conn, tuple(fn[i] for fn, _ in combo))))
                    for i in range(len(values)))
                _offer(found, outputs, Application(conn, tuple(w for _, w in combo)))
        previous = {fn for fn, _ in snapshot}
        new = [fn for fn in found if fn not in functions]
        for fn, witness in found.items():
            _offer(functions, fn, witness)
        logger.debug(f"Clone round {rounds}: {len(new)} new, {len(functions)} total")
        if not new:
            break
    logger.info(f"Unary clone of {nmatrix.name}: {len(functions)} functions after {rounds} rounds")
    return UnaryClone(values, functions, rounds, p)


def _offer(table: Dict[Tuple[str, ...], Formula], function: Tuple[str, ...], witness: Formula) -> None:
    current = table.get(function)
    if current is None or _key(witness) < _key(current):
        table[function] = witness


def _separates_function(function: Tuple[str, ...], i: int, j: int, designated) -> bool:
    return (function[i] in designated) != (function[j] in designated)


def decide_monadicity_matrix(nmatrix: Nmatrix) -> SeparatorReport:
    """
    Exact monadicity decision for a deterministic matrix.

    Raises:
        NotDeterministicError: If ``nmatrix`` is not deterministic.
    """
    clone = unary_clone(nmatrix)
    ordered = sorted(clone.functions.items(), key=lambda item: _key(item[1]))
    index = nmatrix.index
    witnesses: Dict[Pair, Formula] = {}
    uncovered = []
    for a, b in distinct_pairs(nmatrix):
        for function, witness in ordered:
            if _separates_function(function, index[a], index[b], nmatrix.designated):
                witnesses[(a, b)] = witness
                break
        else:
            uncovered.append((a, b))
    verdict = Verdict.NOT_MONADIC if uncovered else Verdict.MONADIC
    logger.info(f"{nmatrix.name}: {verdict.value} (clone of {len(clone)} functions, "
                f"{len(uncovered)} uncovered pairs)")
    return SeparatorReport(verdict, witnesses, tuple(uncovered), None, len(clone), certified=True)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _image_at(function: MultiFunction, value: str):
    return function.table[0][1] if function.arity == 0 else function(value)


def monadic_strata(signature: Signature, max_size: int, variable: Variable,
                   nmatrix: Optional[Nmatrix] = None, prune: bool = False,
                   executor: Optional[Executor] = None
                   ) -> Iterator[Tuple[int, List[Formula], Optional[List[MultiFunction]]]]:
    """
    Formulas over ``signature`` whose only variable is ``variable``, by size.

    Yields (size, formulas sorted by text, their multi-functions or None).
    Multi-functions are computed when ``nmatrix`` is given. With ``prune``, a
    formula expressing a pointwise-singleton function already expressed by an
    earlier formula is still yielded but not used as an argument of larger
    formulas.
    """
    if prune and nmatrix is None:
        raise NmlabError("Pruning needs an Nmatrix to evaluate formulas")
    connectives = list(signature.items)
    levels: Dict[int, List[Formula]] = {}
    canonical = set()
    for size in range(1, max_size + 1):
        if size == 1:
            stratum = [variable] + [Application(conn) for conn, arity in connectives if arity == 0]
        else:
            stratum = []
            for conn, arity in connectives:
                if arity == 0 or arity > size - 1:
                    continue
                for parts in _compositions(size - 1, arity):
                    if any(not levels.get(part) for part in parts):
                        continue
                    for args in product(*(levels[part] for part in parts)):
                        stratum.append(Application(conn, args))
        stratum.sort(key=lambda f: f.text)
        functions = None
        if nmatrix is not None:
            if executor is not None:
                functions = list(executor.map(lambda f: expressed_multifunction(nmatrix, f), stratum))
            else:
                functions = [expressed_multifunction(nmatrix, f) for f in stratum]
        kept = []
        for i, formula in enumerate(stratum):
            if prune and functions[i].is_pointwise_singleton():
                # a pointwise-singleton subformula constrains nothing below it, so the
                # first formula with its function stands in for the rest;
                # closed formulas and p-formulas share one key space
                key = tuple(_image_at(functions[i], value) for value in nmatrix.values)
                if key in canonical:
                    continue
                canonical.add(key)
            kept.append(formula)
        levels[size] = kept
        logger.debug(f"Stratum {size}: {len(stratum)} formulas, {len(kept)} kept as arguments")
        yield size, stratum, functions


def enumerate_monadic_formulas(signature: Signature, max_size: int, prune_with: Optional[Nmatrix] = None,
                               variable: Optional[Variable] = None) -> Iterator[Formula]:
    """
    Every formula with at most ``max_size`` nodes over one variable.

    Order: node count, then canonical text. ``prune_with`` enables the
    pointwise-singleton pruning against that Nmatrix.
    """
    variable = variable or fresh_variable(signature)
    for _, stratum, _ in monadic_strata(signature, max_size, variable, prune_with, prune_with is not None):
        yield from stratum


def search_separators(nmatrix: Nmatrix, budget: int, prune: bool = True, jobs: int = 1) -> SeparatorReport:
    """
    Look for monadic separators with at most ``budget`` nodes.

    Args:
        nmatrix: Any Nmatrix.
        budget: Maximum node count, at least 1.
        prune: Reuse only the first formula of each pointwise-singleton
            function as an argument.
        jobs: Worker threads used to evaluate each size stratum.

    Returns:
        MONADIC as soon as every pair is covered, UNKNOWN otherwise.
    """
    if budget < 1:
        raise NmlabError(f"budget must be at least 1, got {budget}")
    pairs = distinct_pairs(nmatrix)
    witnesses: Dict[Pair, Formula] = {}
    enumerated = 0
    if not pairs:
        return SeparatorReport(Verdict.MONADIC, {}, (), budget, 0)
    variable = fresh_variable(nmatrix.signature)
    designated = nmatrix.designated
    executor = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for size, stratum, functions in monadic_strata(nmatrix.signature, budget, variable,
                                                       nmatrix, prune, executor):
            for formula, function in zip(stratum, functions):
                enumerated += 1
                images = {value: _image_at(function, value) for value in nmatrix.values}
                for a, b in pairs:
                    if (a, b) in witnesses:
                        continue
                    ia, ib = images[a], images[b]
                    if (ia <= designated and ib.isdisjoint(designated)) or (
                            ib <= designated and ia.isdisjoint(designated)):
                        witnesses[(a, b)] = formula
                if len(witnesses) == len(pairs):
                    logger.info(f"{nmatrix.name}: all {len(pairs)} pairs separated at size {size}")
                    return SeparatorReport(Verdict.MONADIC, dict(witnesses), (), budget, enumerated)
    finally:
        if executor is not None:
            executor.shutdown()
    uncovered = tuple(pair for pair in pairs if pair not in witnesses)
    logger.info(f"{nmatrix.name}: UNKNOWN at budget {budget}, {len(uncovered)} pairs uncovered "
                f"after {enumerated} formulas")
    return SeparatorReport(Verdict.UNKNOWN, dict(witnesses), uncovered, budget, enumerated)


def verify_separator_set(nmatrix: Nmatrix, formulas: Iterable[Formula]) -> CoverageReport:
    """
    Check whether ``formulas`` separate every pair of distinct values.

    Raises:
        NmlabError: If a formula has more than one variable.
    """
    formulas = list(formulas)
    tables = []
    for formula in formulas:
        names = [v.name for v in subformula_dag(formula).variables]
        if len(names) > 1:
            raise NmlabError(f"{formula.text} is not monadic: variables {names}")
        function = expressed_multifunction(nmatrix, formula)
        tables.append({value: _image_at(function, value) for value in nmatrix.values})
    designated = nmatrix.designated
    coverage: Dict[Pair, Formula] = {}
    for a, b in distinct_pairs(nmatrix):
        for formula, images in zip(formulas, tables):
            ia, ib = images[a], images[b]
            if (ia <= designated and ib.isdisjoint(designated)) or (
                    ib <= designated and ia.isdisjoint(designated)):
                coverage[(a, b)] = formula
                break
    uncovered = tuple(pair for pair in distinct_pairs(nmatrix) if pair not in coverage)
    return CoverageReport(not uncovered, coverage, uncovered)
