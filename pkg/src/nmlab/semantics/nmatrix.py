"""
Nmatrix representation.

An Nmatrix is a finite value set, a designated subset and, for every
connective, a total map from value tuples to nonempty value sets. Tables are
stored as rows; a row may use ``*`` in any position to cover every value.
Rows without ``*`` always win; among wildcard rows the first one listed wins.
"""

import logging
from itertools import product
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from nmlab.errors import NmatrixError
from nmlab.formula_core import Signature

logger = logging.getLogger(__name__)

WILDCARD = "*"

Row = Tuple[Tuple[str, ...], FrozenSet[str]]


class Interpretation:
    """
    Row-based table of one connective.

    Args:
        arity: Number of arguments.
        rows: Iterable of (pattern, values) pairs. A pattern is a tuple of
            value names or ``*``.
    """

    def __init__(self, arity: int, rows: Iterable[Tuple[Sequence[str], Iterable[str]]]):
        self.arity = arity
        self._explicit: Dict[Tuple[str, ...], FrozenSet[str]] = {}
        self._wildcards: List[Row] = []
        self._cache: Dict[Tuple[str, ...], Optional[FrozenSet[str]]] = {}
        for pattern, values in rows:
            pattern = tuple(pattern)
            values = frozenset(values)
            if len(pattern) != arity:
                raise NmatrixError(f"Row {pattern} has {len(pattern)} entries, expected {arity}")
            if WILDCARD in pattern:
                self._wildcards.append((pattern, values))
            elif pattern in self._explicit:
                raise NmatrixError(f"Row {pattern} listed twice")
            else:
                self._explicit[pattern] = values

    def cell(self, args: Tuple[str, ...]) -> Optional[FrozenSet[str]]:
        """Return the value set at ``args``, or None when no row covers it."""
        try:
            return self._cache[args]
        except KeyError:
            pass
        found = self._explicit.get(args)
        if found is None:
            for pattern, values in self._wildcards:
                if all(p == WILDCARD or p == a for p, a in zip(pattern, args)):
                    found = values
                    break
        self._cache[args] = found
        return found

    @property
    def explicit_rows(self) -> List[Row]:
        return list(self._explicit.items())

    @property
    def wildcard_rows(self) -> List[Row]:
        return list(self._wildcards)

    def rows(self) -> List[Row]:
        """Explicit rows first, then wildcard rows in precedence order."""
        return self.explicit_rows + self.wildcard_rows

    @property
    def has_catch_all(self) -> bool:
        return any(all(p == WILDCARD for p in pattern) for pattern, _ in self._wildcards)


class Nmatrix:
    """
    A finite non-deterministic logical matrix.

    Instances are compared and hashed by identity; evaluation memo tables
    are keyed on the object itself.

    Args:
        values: Value names; their order is the display and enumeration order.
        designated: Designated value names.
        interpretations: Map from connective name to its Interpretation.
        name: Optional label used in logs and reports.

    Raises:
        NmatrixError: If the value set is empty, a value name is repeated, or
            a table is partial, has an empty cell or mentions an unknown value.
    """

    def __init__(self, values: Sequence[str], designated: Iterable[str],
                 interpretations: Mapping[str, Interpretation], name: Optional[str] = None):
        self.values: Tuple[str, ...] = tuple(values)
        self.designated: FrozenSet[str] = frozenset(designated)
        self.interpretations: Dict[str, Interpretation] = dict(interpretations)
        self.name = name or "nmatrix"
        self.index: Dict[str, int] = {value: i for i, value in enumerate(self.values)}
        self._choices: Dict[Tuple[str, Tuple[str, ...]], Tuple[str, ...]] = {}
        self._validate()
        self.signature = Signature(tuple((conn, interp.arity) for conn, interp in self.interpretations.items()))
        logger.debug(f"Built Nmatrix '{self.name}' with {len(self.values)} values "
                     f"and {len(self.interpretations)} connectives")

    @classmethod
    def from_functions(cls, values: Sequence[str], designated: Iterable[str],
                       functions: Mapping[str, Tuple[int, Callable[..., Iterable[str]]]],
                       name: Optional[str] = None) -> "Nmatrix":
        """
        Build an Nmatrix by tabulating Python callables over every input tuple.

        Each callable receives the argument values positionally and returns a
        single value name or an iterable of value names.
        """
        interpretations = {}
        for conn, (arity, fn) in functions.items():
            rows = []
            for args in product(values, repeat=arity):
                result = fn(*args)
                rows.append((args, (result,) if isinstance(result, str) else tuple(result)))
            interpretations[conn] = Interpretation(arity, rows)
        return cls(values, designated, interpretations, name=name)

    def _validate(self) -> None:
        if not self.values:
            raise NmatrixError("An Nmatrix needs at least one value")
        if len(self.index) != len(self.values):
            raise NmatrixError("Value names must be unique")
        if WILDCARD in self.index:
            raise NmatrixError(f"'{WILDCARD}' cannot be used as a value name")
        unknown = self.designated - set(self.values)
        if unknown:
            raise NmatrixError(f"Designated values not in the value set: {sorted(unknown)}")
        for conn, interp in self.interpretations.items():
            for pattern, cell in interp.rows():
                if not cell:
                    raise NmatrixError(f"Empty cell for {conn}{pattern}")
                strays = [v for v in pattern if v != WILDCARD and v not in self.index]
                strays += [v for v in cell if v not in self.index]
                if strays:
                    raise NmatrixError(f"Unknown value(s) {sorted(set(strays))} in table of '{conn}'")
            if interp.has_catch_all:
                continue
            for args in product(self.values, repeat=interp.arity):
                if interp.cell(args) is None:
                    raise NmatrixError(f"Table of '{conn}' is not total: no row for {args}")

    def __repr__(self) -> str:
        return (f"Nmatrix(name={self.name!r}, values={len(self.values)}, "
                f"connectives={len(self.interpretations)})")

    def arity(self, conn: str) -> int:
        return self.interpretations[conn].arity

    def cell(self, conn: str, args: Tuple[str, ...]) -> FrozenSet[str]:
        """The value set of connective ``conn`` at ``args``."""
        return self.interpretations[conn].cell(tuple(args))

    def choices(self, conn: str, args: Tuple[str, ...]) -> Tuple[str, ...]:
        """The cell at ``args`` as a tuple in value order."""
        key = (conn, args)
        found = self._choices.get(key)
        if found is None:
            found = tuple(self.sorted_values(self.interpretations[conn].cell(args)))
            self._choices[key] = found
        return found

    def is_designated(self, value: str) -> bool:
        return value in self.designated

    @property
    def undesignated(self) -> FrozenSet[str]:
        return frozenset(self.values) - self.designated

    def sorted_values(self, values: Iterable[str]) -> List[str]:
        return sorted(values, key=self.index.__getitem__)

    def cells(self, conn: str) -> Iterator[Tuple[Tuple[str, ...], FrozenSet[str]]]:
        """Every (input tuple, value set) of ``conn`` in value order."""
        interp = self.interpretations[conn]
        for args in product(self.values, repeat=interp.arity):
            yield args, interp.cell(args)

    def is_deterministic(self) -> bool:
        """
        True when every cell is a singleton.

        Nullary connectives are scanned first. A wildcard row only counts
        when some input tuple actually reaches it.
        """
        ordered = sorted(self.interpretations.items(), key=lambda item: item[1].arity)
        for conn, interp in ordered:
            for pattern, cell in interp.rows():
                if len(cell) == 1:
                    continue
                if WILDCARD not in pattern:
                    return False
                choices = [self.values if p == WILDCARD else (p,) for p in pattern]
                if any(interp.cell(args) == cell for args in product(*choices)):
                    return False
        return True

    def reduct(self, keep: Iterable[str], name: Optional[str] = None) -> "Nmatrix":
        """Same values and designated set, only the connectives in ``keep``."""
        keep = list(keep)
        missing = [conn for conn in keep if conn not in self.interpretations]
        if missing:
            raise NmatrixError(f"Cannot take reduct: unknown connectives {missing}")
        return Nmatrix(self.values, self.designated,
                       {conn: self.interpretations[conn] for conn in keep},
                       name=name or f"{self.name}-reduct")
