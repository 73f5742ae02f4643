"""
Valuation semantics over subformula DAGs.

A valuation only matters on the subformulas of the formulas at hand, so every
query here walks the deduplicated subformula DAG in postorder and assigns one
value per distinct subformula, branching only where a cell has more than one
value.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from nmlab.config_utils import get_consequence_cap, get_setting
from nmlab.errors import NmatrixError, NmlabError, ResourceLimitError
from nmlab.formula_core import Application, Formula, SubformulaDag, Variable, subformula_dag
from .nmatrix import Nmatrix

logger = logging.getLogger(__name__)

VarValues = Mapping[Union[str, Variable], str]


@dataclass(frozen=True)
class Assignment:
    """Values for every entry of a subformula DAG, indexed like ``dag.nodes``."""

    dag: SubformulaDag
    values: Tuple[str, ...]

    def __getitem__(self, formula: Formula) -> str:
        return self.values[self.dag.index(formula)]

    @property
    def root_value(self) -> str:
        return self.values[self.dag.root]

    def as_dict(self) -> Dict[Formula, str]:
        return dict(zip(self.dag.nodes, self.values))


@dataclass(frozen=True)
class MultiFunction:
    """
    The multi-function a formula expresses.

    ``table`` maps input tuples (one value per variable, in first-occurrence
    order) to nonempty value sets.
    """

    arity: int
    variables: Tuple[str, ...]
    table: Tuple[Tuple[Tuple[str, ...], FrozenSet[str]], ...]

    def __call__(self, *args: str) -> FrozenSet[str]:
        return dict(self.table)[tuple(args)]

    def images(self) -> Tuple[FrozenSet[str], ...]:
        """Images in input order."""
        return tuple(image for _, image in self.table)

    def is_pointwise_singleton(self) -> bool:
        return all(len(image) == 1 for _, image in self.table)

    def as_function(self) -> Tuple[str, ...]:
        """Pointwise-singleton images flattened, e.g. ('0', '1/2', '1')."""
        if not self.is_pointwise_singleton():
            raise NmlabError("multi-function is not pointwise singleton")
        return tuple(next(iter(image)) for _, image in self.table)


def _var_key(var: Union[str, Variable]) -> str:
    return var.name if isinstance(var, Variable) else var


def _fixed_values(nmatrix: Nmatrix, dag: SubformulaDag, var_values: Optional[VarValues]) -> Dict[int, str]:
    given = {_var_key(var): value for var, value in (var_values or {}).items()}
    fixed = {}
    for i, node in enumerate(dag.nodes):
        if isinstance(node, Variable):
            if node.name not in given:
                raise NmlabError(f"No value given for variable '{node.name}'")
            value = given[node.name]
            if value not in nmatrix.index:
                raise NmatrixError(f"'{value}' is not a value of {nmatrix.name}")
            fixed[i] = value
    return fixed


def _walk(nmatrix: Nmatrix, dag: SubformulaDag, fixed: Mapping[int, str],
          allowed: Optional[Mapping[int, FrozenSet[str]]] = None,
          stop_before: Optional[int] = None) -> Iterator[List[str]]:
    """
    Depth-first enumeration of consistent assignments.

    Yields the shared ``current`` list, so callers must copy what they keep.
    When ``stop_before`` is given, positions from it onwards are left
    unassigned and the walk yields as soon as the prefix is complete.
    """
    nodes, children = dag.nodes, dag.children
    end = len(nodes) if stop_before is None else stop_before
    allowed = allowed or {}
    current: List[Optional[str]] = [None] * len(nodes)
    pending: List[Optional[List[str]]] = [None] * end
    pos = 0
    while pos >= 0:
        if pos == end:
            yield current
            pos -= 1
            continue
        if pending[pos] is None:
            node = nodes[pos]
            if isinstance(node, Variable):
                candidates = [fixed[pos]]
            else:
                args = tuple(current[c] for c in children[pos])
                candidates = list(nmatrix.choices(node.connective, args))
            if pos in allowed:
                candidates = [value for value in candidates if value in allowed[pos]]
            candidates.reverse()
            pending[pos] = candidates
        if pending[pos]:
            current[pos] = pending[pos].pop()
            pos += 1
        else:
            pending[pos] = None
            pos -= 1


def _root_cell(nmatrix: Nmatrix, dag: SubformulaDag, current: Sequence[str], fixed: Mapping[int, str]) -> Tuple[str, ...]:
    root = dag.root
    node = dag.nodes[root]
    if isinstance(node, Variable):
        return (fixed[root],)
    return nmatrix.choices(node.connective, tuple(current[c] for c in dag.children[root]))


def consistent_assignments(nmatrix: Nmatrix, formula: Formula,
                           var_values: Optional[VarValues] = None) -> Iterator[Assignment]:
    """
    Stream the consistent assignments on Sub(formula) extending ``var_values``.

    Args:
        nmatrix: The Nmatrix giving the cells.
        formula: Root formula.
        var_values: Value per variable of ``formula`` (by name or Variable).

    Yields:
        Assignment objects, in depth-first order with cell values tried in
        value order.
    """
    dag = subformula_dag(formula)
    fixed = _fixed_values(nmatrix, dag, var_values)
    for current in _walk(nmatrix, dag, fixed):
        yield Assignment(dag, tuple(current))


def _image(nmatrix: Nmatrix, formula: Formula, inputs: Tuple[str, ...], stop_when=None) -> FrozenSet[str]:
    dag = subformula_dag(formula)
    fixed = _fixed_values(nmatrix, dag, dict(zip((v.name for v in dag.variables), inputs)))
    seen = set()
    full = len(nmatrix.values)
    # the root cell is unioned instead of branched on
    for current in _walk(nmatrix, dag, fixed, stop_before=dag.root):
        seen.update(_root_cell(nmatrix, dag, current, fixed))
        if len(seen) == full or (stop_when is not None and stop_when(seen)):
            break
    return frozenset(seen)


@lru_cache(maxsize=get_setting("semantics", "memo_size", 65536))
def _memo_image(nmatrix: Nmatrix, formula: Formula, inputs: Tuple[str, ...]) -> FrozenSet[str]:
    return _image(nmatrix, formula, inputs)


def image(nmatrix: Nmatrix, formula: Formula, var_values: Optional[VarValues] = None,
          stop_when=None) -> FrozenSet[str]:
    """
    The set of values ``formula`` can take for one input tuple.

    Args:
        nmatrix: The Nmatrix.
        formula: The formula.
        var_values: Value per variable.
        stop_when: Optional predicate on the partial image; enumeration stops
            as soon as it holds. Early-stopped results are not memoized.

    Returns:
        The (possibly partial, when ``stop_when`` fired) image.
    """
    given = {_var_key(var): value for var, value in (var_values or {}).items()}
    names = [v.name for v in subformula_dag(formula).variables]
    missing = [name for name in names if name not in given]
    if missing:
        raise NmlabError(f"No value given for variable(s) {missing}")
    inputs = tuple(given[name] for name in names)
    if stop_when is not None:
        return _image(nmatrix, formula, inputs, stop_when)
    return _memo_image(nmatrix, formula, inputs)


def expressed_multifunction(nmatrix: Nmatrix, formula: Formula) -> MultiFunction:
    """
    Tabulate the multi-function ``formula`` expresses in ``nmatrix``.

    Variables are ordered by first left-to-right occurrence; inputs are
    enumerated in value order.
    """
    names = tuple(v.name for v in subformula_dag(formula).variables)
    table = tuple((inputs, _memo_image(nmatrix, formula, inputs))
                  for inputs in product(nmatrix.values, repeat=len(names)))
    return MultiFunction(len(names), names, table)


def _countermodel(nmatrix: Nmatrix, premises: Sequence[Formula], conclusion: Formula,
                  cap: Optional[int]) -> Optional[Assignment]:
    dag = SubformulaDag.of(list(premises) + [conclusion])
    names = [v.name for v in dag.variables]
    total = len(nmatrix.values) ** len(names)
    if cap is not None and total > cap:
        raise ResourceLimitError(
            f"{total} variable assignments exceed the cap of {cap} "
            f"({len(names)} variables over {len(nmatrix.values)} values)")
    allowed: Dict[int, FrozenSet[str]] = {}
    for root in dag.roots[:-1]:
        allowed[root] = nmatrix.designated
    conclusion_root = dag.roots[-1]
    allowed[conclusion_root] = allowed.get(conclusion_root, frozenset(nmatrix.values)) & nmatrix.undesignated
    for inputs in product(nmatrix.values, repeat=len(names)):
        fixed = _fixed_values(nmatrix, dag, dict(zip(names, inputs)))
        for current in _walk(nmatrix, dag, fixed, allowed):
            return Assignment(dag, tuple(current))
    return None


def find_countermodel(nmatrix: Nmatrix, premises: Iterable[Formula], conclusion: Formula,
                      cap: Optional[int] = None) -> Optional[Assignment]:
    """
    Look for a valuation designating every premise but not the conclusion.

    Args:
        nmatrix: The Nmatrix.
        premises: Finite premise set.
        conclusion: The conclusion.
        cap: Maximum number of variable assignments to try; defaults to the
            configured consequence cap.

    Returns:
        The countermodel restricted to the subformulas involved, or None.

    Raises:
        ResourceLimitError: If |A|^|Var| exceeds the cap.
    """
    cap = get_consequence_cap() if cap is None else cap
    return _countermodel(nmatrix, list(premises), conclusion, cap)


def check_consequence(nmatrix: Nmatrix, premises: Iterable[Formula], conclusion: Formula,
                      cap: Optional[int] = None) -> bool:
    """True iff ``premises`` entail ``conclusion`` in ``nmatrix``."""
    return find_countermodel(nmatrix, premises, conclusion, cap) is None


def is_theorem(nmatrix: Nmatrix, formula: Formula) -> bool:
    """True iff every valuation designates ``formula``."""
    return _countermodel(nmatrix, [], formula, None) is None


def separates(nmatrix: Nmatrix, formula: Formula, a: str, b: str) -> bool:
    """
    True iff the one-variable ``formula`` separates ``a`` from ``b``.

    Raises:
        NmlabError: If ``formula`` has two or more variables.
    """
    names = [v.name for v in subformula_dag(formula).variables]
    if len(names) > 1:
        raise NmlabError(f"Separators must have at most one variable, got {names}")
    image_a = image(nmatrix, formula, {names[0]: a} if names else None)
    image_b = image(nmatrix, formula, {names[0]: b} if names else None)
    designated = nmatrix.designated
    return ((image_a <= designated and image_b.isdisjoint(designated))
            or (image_b <= designated and image_a.isdisjoint(designated)))


def infectious_values(nmatrix: Nmatrix) -> FrozenSet[str]:
    """Values * such that every cell with * among its inputs is exactly {*}."""
    connectives = [(conn, interp.arity) for conn, interp in nmatrix.interpretations.items()
                   if interp.arity > 0]
    candidates = [value for value in nmatrix.values
                  if all(nmatrix.cell(conn, (value,) * arity) == {value} for conn, arity in connectives)]
    found = []
    for star in candidates:
        infectious = True
        for conn, arity in connectives:
            for args in product(nmatrix.values, repeat=arity):
                if star in args and nmatrix.cell(conn, args) != {star}:
                    infectious = False
                    break
            if not infectious:
                break
        if infectious:
            found.append(star)
    logger.debug(f"Infectious values of {nmatrix.name}: {found}")
    return frozenset(found)


def is_consistent(nmatrix: Nmatrix, assignment: Mapping[Formula, str]) -> bool:
    """
    Check the valuation condition on a partial assignment.

    Every application whose arguments are all assigned must get a value from
    the cell at the arguments' values.
    """
    for formula, value in assignment.items():
        if value not in nmatrix.index:
            return False
        if isinstance(formula, Application):
            if not all(arg in assignment for arg in formula.args):
                continue
            args = tuple(assignment[arg] for arg in formula.args)
            if value not in nmatrix.cell(formula.connective, args):
                return False
    return True


def is_deterministic(nmatrix: Nmatrix) -> bool:
    return nmatrix.is_deterministic()


def reduct(nmatrix: Nmatrix, keep: Iterable[str], name: Optional[str] = None) -> Nmatrix:
    return nmatrix.reduct(keep, name)
