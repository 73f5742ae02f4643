"""
Formula core module.

Provides signatures, formula terms (variables and connective applications),
a pyparsing grammar for the canonical prefix text form, and the subformula
DAG used by every evaluator in the package.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import pyparsing as pp

from nmlab.errors import FormulaSyntaxError, SignatureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Signature:
    """
    A finite map from connective names to arities.

    Args:
        items: Tuple of (name, arity) pairs in declaration order.
    """

    items: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for name, arity in self.items:
            if name in seen:
                raise SignatureError(f"Connective '{name}' declared twice")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"Connective '{name}' has invalid arity {arity!r}")
            seen.add(name)

    @classmethod
    def of(cls, connectives: Union[Mapping[str, int], Iterable[Tuple[str, int]]]) -> "Signature":
        if isinstance(connectives, Mapping):
            return cls(tuple(connectives.items()))
        return cls(tuple(connectives))

    @cached_property
    def arities(self) -> Dict[str, int]:
        return dict(self.items)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.items)

    def arity(self, name: str) -> Optional[int]:
        """Return the arity of ``name`` or None when it is not a connective."""
        return self.arities.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.arities

    def __len__(self) -> int:
        return len(self.items)

    def extend(self, extra: Union[Mapping[str, int], Iterable[Tuple[str, int]]]) -> "Signature":
        extra_items = tuple(extra.items()) if isinstance(extra, Mapping) else tuple(extra)
        return Signature(self.items + extra_items)


@dataclass(frozen=True)
class Variable:
    name: str

    @property
    def size(self) -> int:
        return 1

    @property
    def text(self) -> str:
        return self.name

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class Application:
    """
    A connective applied to argument formulas.

    The hash and node count are computed once from the (already built)
    children, so building a term bottom-up costs O(arity) per node.
    """

    connective: str
    args: Tuple["Formula", ...] = ()
    size: int = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        args = tuple(self.args)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "size", 1 + sum(arg.size for arg in args))
        object.__setattr__(self, "_hash", hash((self.connective, args)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Application) or self._hash != other._hash:
            return False
        if self.size != other.size:
            return False
        return self.connective == other.connective and self.args == other.args

    @cached_property
    def text(self) -> str:
        return format_formula(self)

    def __str__(self) -> str:
        return self.text


Formula = Union[Variable, Application]


# Grammar: formula := IDENT | IDENT '(' formula (',' formula)* ')'
_IDENT = pp.Word(pp.alphas + "_", pp.alphanums + "_")


@dataclass(frozen=True)
class _RawTerm:
    name: str
    loc: int
    args: Optional[tuple]


def _make_raw(s, loc, toks):
    args = tuple(toks[1]) if len(toks) > 1 else None
    return _RawTerm(toks[0], loc, args)


_FORMULA = pp.Forward()
_ARGS = pp.Group(pp.Suppress("(") + _FORMULA + pp.ZeroOrMore(pp.Suppress(",") + _FORMULA) + pp.Suppress(")"))
_FORMULA <<= (_IDENT + pp.Optional(_ARGS)).set_parse_action(_make_raw)


def _build(raw: _RawTerm, signature: Signature) -> Formula:
    arity = signature.arity(raw.name)
    if raw.args is None:
        if arity is None:
            return Variable(raw.name)
        if arity != 0:
            raise SignatureError(
                f"Connective '{raw.name}' expects {arity} arguments, got 0 (at position {raw.loc})")
        return Application(raw.name)
    if arity is None:
        raise SignatureError(f"Unknown connective '{raw.name}' (at position {raw.loc})")
    if arity != len(raw.args):
        raise SignatureError(
            f"Connective '{raw.name}' expects {arity} arguments, got {len(raw.args)} (at position {raw.loc})")
    return Application(raw.name, tuple(_build(arg, signature) for arg in raw.args))


def parse_formula(text: str, signature: Signature) -> Formula:
    """
    Parse the canonical prefix form of a formula.

    An identifier that is not a connective of ``signature`` denotes a
    variable. A nullary connective is written as its bare name.

    Args:
        text: Formula text, whitespace between tokens is ignored.
        signature: Signature used to tell connectives from variables.

    Returns:
        The parsed formula.

    Raises:
        FormulaSyntaxError: If the text is malformed.
        SignatureError: If a connective is unknown or used with the wrong arity.
    """
    try:
        raw = _FORMULA.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as exc:
        raise FormulaSyntaxError(f"Malformed formula: {exc.msg}", exc.loc) from None
    except RecursionError:
        raise FormulaSyntaxError("Formula is nested too deeply to parse", 0) from None
    return _build(raw, signature)


def format_formula(formula: Formula) -> str:
    """Render ``formula`` in canonical prefix form without whitespace."""
    rendered: Dict[int, str] = {}
    stack = [(formula, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in rendered:
            continue
        if isinstance(node, Variable):
            rendered[id(node)] = node.name
        elif not node.args:
            rendered[id(node)] = node.connective
        elif ready:
            inner = ",".join(rendered[id(arg)] for arg in node.args)
            rendered[id(node)] = f"{node.connective}({inner})"
        else:
            stack.append((node, True))
            stack.extend((arg, False) for arg in reversed(node.args))
    return rendered[id(formula)]


def format_formula_infix(formula: Formula, symbols: Optional[Mapping[str, str]] = None) -> str:
    """
    Render ``formula`` with binary connectives written infix.

    Binary applications become ``(left sym right)``, unary ones ``sym arg``
    and all other arities use the prefix form.

    Args:
        formula: Formula to render.
        symbols: Optional map from connective name to display symbol.
    """
    symbols = symbols or {}
    rendered: Dict[int, str] = {}
    stack = [(formula, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in rendered:
            continue
        if isinstance(node, Variable):
            rendered[id(node)] = node.name
            continue
        sym = symbols.get(node.connective, node.connective)
        if not node.args:
            rendered[id(node)] = sym
        elif ready:
            parts = [rendered[id(arg)] for arg in node.args]
            if len(parts) == 2:
                rendered[id(node)] = f"({parts[0]} {sym} {parts[1]})"
            elif len(parts) == 1:
                separator = " " if sym[-1:].isalnum() else ""
                rendered[id(node)] = f"{sym}{separator}{parts[0]}"
            else:
                rendered[id(node)] = f"{sym}({', '.join(parts)})"
        else:
            stack.append((node, True))
            stack.extend((arg, False) for arg in reversed(node.args))
    return rendered[id(formula)]


def formula_size(formula: Formula) -> int:
    """Node count of the formula tree; shared subterms count once per occurrence."""
    return formula.size


@dataclass(frozen=True)
class SubformulaDag:
    """
    Deduplicated subformulas in postorder.

    ``children[i]`` holds the node indices of the arguments of ``nodes[i]``;
    every child index is smaller than its parent's. ``roots`` are the indices
    of the formulas the DAG was built from, in the order given.
    """

    nodes: Tuple[Formula, ...]
    children: Tuple[Tuple[int, ...], ...]
    roots: Tuple[int, ...]

    @classmethod
    def of(cls, formulas: Iterable[Formula]) -> "SubformulaDag":
        index: Dict[Formula, int] = {}
        nodes = []
        children = []
        roots = []
        for formula in formulas:
            stack = [(formula, False)]
            while stack:
                node, ready = stack.pop()
                if node in index:
                    continue
                if ready or isinstance(node, Variable) or not node.args:
                    index[node] = len(nodes)
                    nodes.append(node)
                    children.append(tuple(index[arg] for arg in node.args)
                                    if isinstance(node, Application) else ())
                    continue
                stack.append((node, True))
                stack.extend((arg, False) for arg in reversed(node.args) if arg not in index)
            roots.append(index[formula])
        return cls(tuple(nodes), tuple(children), tuple(roots))

    @cached_property
    def positions(self) -> Dict[Formula, int]:
        return {node: i for i, node in enumerate(self.nodes)}

    def index(self, formula: Formula) -> int:
        return self.positions[formula]

    @property
    def root(self) -> int:
        return self.roots[-1]

    @cached_property
    def variables(self) -> Tuple[Variable, ...]:
        return tuple(node for node in self.nodes if isinstance(node, Variable))


def subformula_dag(*formulas: Formula) -> SubformulaDag:
    """Build the deduplicated subformula DAG of one or more formulas."""
    return SubformulaDag.of(formulas)


def variables(formula: Formula) -> frozenset:
    return frozenset(subformula_dag(formula).variables)


def ordered_variables(*formulas: Formula) -> Tuple[Variable, ...]:
    """Variables of the formulas in order of first left-to-right occurrence."""
    return subformula_dag(*formulas).variables


def substitute(formula: Formula, mapping: Mapping[Variable, Formula]) -> Formula:
    """Replace variables according to ``mapping``; unmapped variables stay."""
    dag = subformula_dag(formula)
    built = []
    for node, kids in zip(dag.nodes, dag.children):
        if isinstance(node, Variable):
            built.append(mapping.get(node, node))
        elif not kids:
            built.append(node)
        else:
            built.append(Application(node.connective, tuple(built[i] for i in kids)))
    return built[dag.root]
