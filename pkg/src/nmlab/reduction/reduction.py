"""
Counter machine to Nmatrix compiler.

``build_nmatrix(C)`` returns an Nmatrix over the signature ``build_sigma(C)``
whose only possible theorem is the formula encoding the halting computation
of ``C``. The module also provides the encoders ``enc``/``seq``, the decoder,
the named valuation families used to refute every other closed formula, and
a bounded exhaustive theorem search.

Value names::

    r_eq0 r_ge0 r_ge1 r_ge2        counter abstractions
    conf_<state>_<tag>..._<tag>    one per state and tag vector
    init err
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from nmlab.errors import ReductionError, ResourceLimitError, SignatureError
from nmlab.formula_core import Application, Formula, Signature, Variable, subformula_dag
from nmlab.machine import Configuration, CounterMachine, Inc, nxt
from nmlab.semantics import Interpretation, Nmatrix, image, infectious_values, is_theorem

logger = logging.getLogger(__name__)

R_EQ0, R_GE0, R_GE1, R_GE2 = "r_eq0", "r_ge0", "r_ge1", "r_ge2"
RM = (R_EQ0, R_GE0, R_GE1, R_GE2)
INIT = "init"
ERR = "err"

ZERO, EPS, SUC = "zero", "eps", "suc"
RESERVED = (ZERO, EPS, SUC)

SUC_TABLE: Dict[str, FrozenSet[str]] = {
    R_EQ0: frozenset({R_GE1}),
    R_GE0: frozenset({R_GE0, R_GE1}),
    R_GE1: frozenset({R_GE2}),
    R_GE2: frozenset({R_GE2}),
}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def step_name(state: str) -> str:
    return f"step_{state}"


def conf_name(state: str, tags: Sequence[str]) -> str:
    return "_".join(("conf", state) + tuple(tags))


def suc_image(value: str) -> FrozenSet[str]:
    return SUC_TABLE.get(value, frozenset({ERR}))


def _check_names(machine: CounterMachine) -> None:
    for state in machine.states:
        if state in RESERVED:
            raise ReductionError(f"State name '{state}' collides with the reserved connective '{state}'")
        if not _IDENT.match(state):
            raise ReductionError(f"State name '{state}' cannot be used in a connective name")


def build_sigma(machine: CounterMachine) -> Signature:
    """zero/0, eps/0, suc/1 and step_<q>/(n+1) for every state q."""
    _check_names(machine)
    items = [(ZERO, 0), (EPS, 0), (SUC, 1)]
    items.extend((step_name(state), machine.n + 1) for state in machine.states)
    return Signature(tuple(items))


class _ConfIndex:
    """Bidirectional map between conf value names and (state, tags)."""

    def __init__(self, machine: CounterMachine):
        self.by_name: Dict[str, Tuple[str, Tuple[str, ...]]] = {}
        self.names: List[str] = []
        for state in machine.states:
            for tags in product(RM, repeat=machine.n):
                name = conf_name(state, tags)
                if name in self.by_name or name in RM or name in (INIT, ERR):
                    raise ReductionError(f"Value name '{name}' is produced twice; rename the states")
                self.by_name[name] = (state, tags)
                self.names.append(name)


def step_cell(machine: CounterMachine, state: str, x: str, z: Tuple[str, ...],
              confs: Optional[Dict[str, Tuple[str, Tuple[str, ...]]]] = None) -> FrozenSet[str]:
    """
    The value set of step_<state> at (x, z1..zn).

    ``confs`` maps conf value names to (state, tags); it is rebuilt when
    omitted.
    """
    if confs is None:
        confs = _ConfIndex(machine).by_name
    if any(tag not in SUC_TABLE for tag in z):
        return frozenset({ERR})
    result = frozenset({conf_name(state, z)})
    if x == INIT:
        if state == machine.init and (all(t == R_EQ0 for t in z) or all(t == R_GE0 for t in z)):
            return result
        return frozenset({ERR})
    if x not in confs:
        return frozenset({ERR})
    prev_state, y = confs[x]
    instruction = machine.delta.get(prev_state)
    if instruction is None:
        return frozenset({ERR})
    i = instruction.counter - 1
    others_equal = all(z[j] == y[j] for j in range(machine.n) if j != i)
    if isinstance(instruction, Inc):
        if state == instruction.target and others_equal and z[i] in SUC_TABLE[y[i]]:
            return result
        return frozenset({ERR})
    if state == instruction.on_zero and y[i] in (R_EQ0, R_GE0) and tuple(y) == tuple(z):
        return result
    if state == instruction.on_nonzero and others_equal and y[i] in SUC_TABLE[z[i]]:
        return result
    return frozenset({ERR})


@lru_cache(maxsize=32)
def build_nmatrix(machine: CounterMachine) -> Nmatrix:
    """
    Compile ``machine`` into its Nmatrix.

    Only cells whose value is not ``err`` are listed explicitly; a catch-all
    wildcard row sends everything else to ``err``.

    Raises:
        ReductionError: If a state name collides with a reserved name.
    """
    sigma = build_sigma(machine)
    confs = _ConfIndex(machine)
    values = list(RM) + confs.names + [INIT, ERR]
    designated = [name for name in confs.names if machine.is_halting(confs.by_name[name][0])]

    interpretations = {
        ZERO: Interpretation(0, [((), (R_EQ0, R_GE0))]),
        EPS: Interpretation(0, [((), (INIT,))]),
        SUC: Interpretation(1, [((value,), tuple(cells)) for value, cells in SUC_TABLE.items()]
                            + [(("*",), (ERR,))]),
    }
    wildcard = ("*",) * (machine.n + 1)
    for state in machine.states:
        rows = []
        for x in [INIT] + confs.names:
            for z in product(RM, repeat=machine.n):
                cell = step_cell(machine, state, x, z, confs.by_name)
                if ERR not in cell:
                    rows.append(((x,) + z, cell))
        rows.append((wildcard, (ERR,)))
        interpretations[step_name(state)] = Interpretation(machine.n + 1, rows)

    nmatrix = Nmatrix(values, designated, interpretations, name="machine")
    logger.info(f"Compiled {machine.n}-counter machine with {len(machine.states)} states: "
                f"{len(values)} values, {len(sigma)} connectives")
    return nmatrix


def enc(k: int) -> Formula:
    """suc applied k times to zero."""
    if k < 0:
        raise ReductionError(f"Cannot encode negative number {k}")
    formula: Formula = Application(ZERO)
    for _ in range(k):
        formula = Application(SUC, (formula,))
    return formula


def seq(configurations: Iterable[Configuration]) -> Formula:
    """Encode a configuration sequence; the empty sequence is ``eps``."""
    formula: Formula = Application(EPS)
    encoded: Dict[int, Formula] = {}
    for cfg in configurations:
        args = []
        for value in cfg.counters:
            if value not in encoded:
                encoded[value] = enc(value)
            args.append(encoded[value])
        formula = Application(step_name(cfg.state), (formula,) + tuple(args))
    return formula


def decode_enc(formula: Formula) -> Optional[int]:
    count = 0
    node = formula
    while isinstance(node, Application) and node.connective == SUC and len(node.args) == 1:
        count += 1
        node = node.args[0]
    if isinstance(node, Application) and node.connective == ZERO and not node.args:
        return count
    return None


def decode_seq(formula: Formula, machine: CounterMachine) -> Optional[Tuple[Configuration, ...]]:
    """
    The configuration sequence ``formula`` encodes, or None when it encodes none.
    """
    states = {step_name(state): state for state in machine.states}
    collected = []
    node = formula
    while isinstance(node, Application) and node.connective in states:
        if len(node.args) != machine.n + 1:
            return None
        counters = tuple(decode_enc(arg) for arg in node.args[1:])
        if any(c is None for c in counters):
            return None
        collected.append(Configuration(states[node.connective], counters))
        node = node.args[0]
    if isinstance(node, Application) and node.connective == EPS and not node.args:
        return tuple(reversed(collected))
    return None


@dataclass(frozen=True)
class NamedValuation:
    """
    One of the valuations v0= (kind "V0EQ") or v_k (kind "VK").

    v0= sends zero to r_eq0; v_k sends enc(j) to r_ge0 for j <= k.
    """

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("V0EQ", "VK"):
            raise ReductionError(f"Unknown valuation kind '{self.kind}'")
        if self.k < 0 or (self.kind == "V0EQ" and self.k != 0):
            raise ReductionError(f"Invalid valuation index {self.k} for {self.kind}")

    @property
    def label(self) -> str:
        return "v0=" if self.kind == "V0EQ" else f"v{self.k}"

    def enc_value(self, j: int) -> str:
        if self.kind == "V0EQ":
            return R_EQ0 if j == 0 else R_GE1 if j == 1 else R_GE2
        if j <= self.k:
            return R_GE0
        return R_GE1 if j == self.k + 1 else R_GE2

    def __str__(self) -> str:
        return self.label


V0EQ = NamedValuation("V0EQ")


def v(k: int) -> NamedValuation:
    return NamedValuation("VK", k)


def named_assignment(machine: CounterMachine, valuation: NamedValuation, formula: Formula) -> Dict[Formula, str]:
    """
    Values the named valuation gives every subformula of the closed ``formula``.

    Raises:
        ReductionError: If ``formula`` has variables.
    """
    nmatrix = build_nmatrix(machine)
    dag = subformula_dag(formula)
    values: List[str] = []
    enc_index: List[Optional[int]] = []
    for node, kids in zip(dag.nodes, dag.children):
        if isinstance(node, Variable):
            raise ReductionError(f"Named valuations only apply to closed formulas; found variable '{node.name}'")
        if node.connective not in nmatrix.interpretations:
            raise SignatureError(f"Unknown connective '{node.connective}'")
        index = None
        if node.connective == ZERO:
            index = 0
        elif node.connective == SUC and enc_index[kids[0]] is not None:
            index = enc_index[kids[0]] + 1
        if index is not None:
            value = valuation.enc_value(index)
        elif node.connective == EPS:
            value = INIT
        elif node.connective == SUC:
            value = ERR
        else:
            cell = nmatrix.cell(node.connective, tuple(values[c] for c in kids))
            value = next(iter(cell))
        values.append(value)
        enc_index.append(index)
    return dict(zip(dag.nodes, values))


def eval_named(machine: CounterMachine, valuation: NamedValuation, formula: Formula) -> str:
    """The value of the closed ``formula`` under the named valuation."""
    return named_assignment(machine, valuation, formula)[formula]


def mu_select(kind: str, a: int, b: int) -> NamedValuation:
    """
    Pick the valuation telling the counter values ``a`` and ``b`` apart.

    Args:
        kind: "plus" (b should be a+1), "minus" (b should be a-1), "neq"
            (b should be a) or "eq" (a is zero).
        a: Counter value before the step.
        b: Counter value after the step.
    """
    if a < 0 or b < 0:
        raise ReductionError(f"Counter values must be nonnegative, got {a}, {b}")
    if kind == "plus":
        if b >= a + 1:
            # a = 0, b = 2 gives v(0), not V0EQ; both send the step to err
            return v(a)
        return v(a - 1) if a != 0 else V0EQ
    if kind == "minus":
        if b <= a - 2:
            return v(a - 2)
        return v(a - 1) if a != 0 else V0EQ
    if kind == "neq":
        return V0EQ if a == 0 else v(a - 1)
    if kind == "eq":
        return V0EQ
    raise ReductionError(f"Unknown selector kind '{kind}'")


def select_refuting_valuation(machine: CounterMachine, cfg: Configuration,
                              next_cfg: Configuration) -> Tuple[str, NamedValuation]:
    """
    A valuation making step_<q'>(conf of ``cfg``, counters of ``next_cfg``) err.

    Returns:
        (selector label, valuation).

    Raises:
        ReductionError: If ``next_cfg`` really is the successor of ``cfg``.
    """
    instruction = machine.delta.get(cfg.state)
    if instruction is None:
        return f"halting({cfg.state})", V0EQ
    if nxt(machine, cfg) == next_cfg:
        raise ReductionError(f"{next_cfg} is the successor of {cfg}; nothing to refute")
    i = instruction.counter - 1
    y, z = cfg.counters, next_cfg.counters
    for j in range(machine.n):
        if j != i and y[j] != z[j]:
            return f"mu_neq({y[j]},{z[j]})", mu_select("neq", y[j], z[j])
    if isinstance(instruction, Inc):
        if next_cfg.state != instruction.target:
            return f"wrong_state({next_cfg.state})", V0EQ
        return f"mu_plus({y[i]},{z[i]})", mu_select("plus", y[i], z[i])
    if y[i] == 0:
        return f"mu_eq({y[i]},{z[i]})", mu_select("eq", y[i], z[i])
    return f"mu_minus({y[i]},{z[i]})", mu_select("minus", y[i], z[i])


class SequenceKind(Enum):
    COMPUTATION = "COMPUTATION"
    EMPTY = "EMPTY"
    BAD_INITIAL = "BAD_INITIAL"
    BAD_STEP = "BAD_STEP"
    NOT_HALTING = "NOT_HALTING"


@dataclass(frozen=True)
class SequenceReason:
    kind: SequenceKind
    index: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is SequenceKind.BAD_STEP:
            return f"BAD_STEP({self.index})"
        return self.kind.value


def classify_sequence(machine: CounterMachine, configurations: Sequence[Configuration]) -> SequenceReason:
    """
    Why ``configurations`` is or is not the halting computation.

    Checks the initial configuration, then every step, then the last state.
    ``BAD_STEP(i)`` means configuration i+1 does not follow configuration i.
    """
    if not configurations:
        return SequenceReason(SequenceKind.EMPTY)
    if configurations[0] != machine.initial_configuration:
        return SequenceReason(SequenceKind.BAD_INITIAL)
    for i in range(len(configurations) - 1):
        current = configurations[i]
        if machine.is_halting(current.state) or nxt(machine, current) != configurations[i + 1]:
            return SequenceReason(SequenceKind.BAD_STEP, i)
    if not machine.is_halting(configurations[-1].state):
        return SequenceReason(SequenceKind.NOT_HALTING)
    return SequenceReason(SequenceKind.COMPUTATION)


@dataclass(frozen=True)
class Refutation:
    valuation: NamedValuation
    value: str
    rule: str


def max_enc_literal(formula: Formula) -> int:
    found = [decode_enc(node) for node in subformula_dag(formula).nodes]
    return max((j for j in found if j is not None), default=0)


def _sweep(machine: CounterMachine, formula: Formula) -> Optional[Refutation]:
    nmatrix = build_nmatrix(machine)
    bound = max_enc_literal(formula) + 2
    for valuation in [V0EQ] + [v(k) for k in range(bound + 1)]:
        value = eval_named(machine, valuation, formula)
        if value not in nmatrix.designated:
            return Refutation(valuation, value, "sweep")
    return None


def _guided(machine: CounterMachine, configurations: Sequence[Configuration]) -> Optional[Tuple[NamedValuation, str]]:
    reason = classify_sequence(machine, configurations)
    if reason.kind is SequenceKind.EMPTY:
        return V0EQ, "empty_sequence"
    if reason.kind is SequenceKind.BAD_INITIAL:
        first = configurations[0]
        if first.state != machine.init:
            return V0EQ, f"bad_initial_state({first.state})"
        nonzero = next(c for c in first.counters if c != 0)
        return v(nonzero - 1), f"bad_initial_counter({nonzero})"
    if reason.kind is SequenceKind.BAD_STEP:
        i = reason.index
        selector, valuation = select_refuting_valuation(machine, configurations[i], configurations[i + 1])
        return valuation, f"bad_step({i}):{selector}"
    if reason.kind is SequenceKind.NOT_HALTING:
        return V0EQ, f"not_halting({configurations[-1].state})"
    return None


def falsify(machine: CounterMachine, formula: Formula) -> Optional[Refutation]:
    """
    Find a named valuation that does not designate the closed ``formula``.

    Sequence formulas get the valuation the failing condition calls for;
    anything else is swept over v0= and v_0 .. v_{K+2}, K being the largest
    enc literal in ``formula``.

    Returns:
        The refutation, or None when ``formula`` is a theorem.

    Raises:
        ReductionError: If ``formula`` has variables.
    """
    configurations = decode_seq(formula, machine)
    if configurations is not None:
        guided = _guided(machine, configurations)
        if guided is not None:
            valuation, rule = guided
            value = eval_named(machine, valuation, formula)
            if value not in build_nmatrix(machine).designated:
                logger.debug(f"Refuted by {valuation.label} ({rule}): {value}")
                return Refutation(valuation, value, rule)
            logger.warning(f"Guided valuation {valuation.label} ({rule}) did not refute; sweeping")
    return _sweep(machine, formula)


class SearchVerdict(Enum):
    FOUND = "FOUND"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class TheoremSearchReport:
    verdict: SearchVerdict
    theorems: Tuple[Formula, ...]
    max_subformulas: int
    candidates: int
    pruned: int


def search_theorems(nmatrix: Nmatrix, max_subformulas: int, cap: Optional[int] = None,
                    prune: bool = True) -> TheoremSearchReport:
    """
    Exhaustive search for closed theorems with few distinct subformulas.

    Closed formulas are grown from the nullary connectives until no new
    formula with at most ``max_subformulas`` distinct subformulas appears.
    With ``prune``, a formula that some valuation sends to an infectious
    undesignated value is dropped together with everything built on it.

    Args:
        nmatrix: Any Nmatrix.
        max_subformulas: Bound on |Sub(phi)|.
        cap: Maximum number of candidate formulas to build.
        prune: Use infectious-value pruning.

    Returns:
        FOUND with the theorems (ordered by size, then text) or UNKNOWN.

    Raises:
        ResourceLimitError: If more than ``cap`` candidates are built.
    """
    stars = frozenset(infectious_values(nmatrix) - nmatrix.designated) if prune else frozenset()
    connectives = [(conn, interp.arity) for conn, interp in nmatrix.interpretations.items()]
    pool: Dict[Formula, FrozenSet[Formula]] = {}
    seen = set()
    pruned = 0

    def consider(formula: Formula, subs: FrozenSet[Formula]) -> bool:
        nonlocal pruned
        seen.add(formula)
        if cap is not None and len(seen) > cap:
            raise ResourceLimitError(f"Theorem search built more than {cap} candidates")
        if stars and not image(nmatrix, formula, stop_when=lambda found: bool(found & stars)).isdisjoint(stars):
            pruned += 1
            return False
        pool[formula] = subs
        return True

    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        members = list(pool.items())
        for conn, arity in connectives:
            if arity == 0:
                formula = Application(conn)
                if formula not in seen:
                    changed |= consider(formula, frozenset({formula}))
                continue
            for combo in product(members, repeat=arity):
                subs = frozenset().union(*(s for _, s in combo))
                if len(subs) >= max_subformulas:
                    continue
                formula = Application(conn, tuple(f for f, _ in combo))
                if formula in seen:
                    continue
                changed |= consider(formula, subs | {formula})
        logger.debug(f"Theorem search round {rounds}: pool {len(pool)}, built {len(seen)}, pruned {pruned}")

    theorems = sorted((f for f in pool if is_theorem(nmatrix, f)), key=lambda f: (len(pool[f]), f.size, f.text))
    verdict = SearchVerdict.FOUND if theorems else SearchVerdict.UNKNOWN
    logger.info(f"Theorem search up to {max_subformulas} subformulas: {verdict.value}, "
                f"{len(theorems)} theorem(s), {len(seen)} candidates, {pruned} pruned")
    return TheoremSearchReport(verdict, tuple(theorems), max_subformulas, len(seen), pruned)

