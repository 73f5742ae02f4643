"""
Deterministic counter machines.

A machine has ``n`` counters, a finite set of states, an initial state and a
partial transition map. ``inc i q`` increments counter i and moves to q;
``test i q0 q1`` moves to q0 when counter i is zero and otherwise decrements
it and moves to q1. Counters are 1-based in text and in the API. States
without a transition are halting.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from nmlab.errors import FileFormatError, MachineError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Inc:
    counter: int
    target: str

    def __str__(self) -> str:
        return f"inc {self.counter} {self.target}"


@dataclass(frozen=True)
class Test:
    __test__ = False

    counter: int
    on_zero: str
    on_nonzero: str

    def __str__(self) -> str:
        return f"test {self.counter} {self.on_zero} {self.on_nonzero}"


Instruction = Union[Inc, Test]


@dataclass(frozen=True)
class Configuration:
    state: str
    counters: Tuple[int, ...]

    def __str__(self) -> str:
        return f"({', '.join((self.state,) + tuple(str(c) for c in self.counters))})"


@dataclass(frozen=True)
class Trace:
    """
    A run from the initial configuration.

    ``halted`` is False when the step budget ran out first.
    """

    configurations: Tuple[Configuration, ...]
    halted: bool

    def __len__(self) -> int:
        return len(self.configurations)

    @property
    def last(self) -> Configuration:
        return self.configurations[-1]


@dataclass(frozen=True)
class CounterMachine:
    """
    Args:
        n: Number of counters, at least 1.
        states: State names in declaration order.
        init: Initial state.
        transitions: (state, instruction) pairs, at most one per state.

    Raises:
        MachineError: On unknown states, duplicate transitions or counter
            indices outside 1..n.
    """

    n: int
    states: Tuple[str, ...]
    init: str
    transitions: Tuple[Tuple[str, Instruction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.n < 1:
            raise MachineError(f"A machine needs at least one counter, got {self.n}")
        if not self.states:
            raise MachineError("A machine needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise MachineError("State names must be unique")
        known = set(self.states)
        if self.init not in known:
            raise MachineError(f"Initial state '{self.init}' is not a declared state")
        seen = set()
        for state, instruction in self.transitions:
            if state not in known:
                raise MachineError(f"Transition from unknown state '{state}'")
            if state in seen:
                raise MachineError(f"State '{state}' has more than one transition")
            seen.add(state)
            if not 1 <= instruction.counter <= self.n:
                raise MachineError(f"Counter {instruction.counter} out of range 1..{self.n} in '{state}'")
            targets = (instruction.target,) if isinstance(instruction, Inc) else (
                instruction.on_zero, instruction.on_nonzero)
            for target in targets:
                if target not in known:
                    raise MachineError(f"Transition of '{state}' targets unknown state '{target}'")

    @cached_property
    def delta(self) -> Dict[str, Instruction]:
        return dict(self.transitions)

    @property
    def halting_states(self) -> Tuple[str, ...]:
        return tuple(state for state in self.states if state not in self.delta)

    def is_halting(self, state: str) -> bool:
        return state not in self.delta

    @property
    def initial_configuration(self) -> Configuration:
        return Configuration(self.init, (0,) * self.n)


def nxt(machine: CounterMachine, cfg: Configuration) -> Configuration:
    """
    One step of ``machine`` from ``cfg``.

    Raises:
        MachineError: If ``cfg`` is in a halting state or malformed.
    """
    if len(cfg.counters) != machine.n or any(c < 0 for c in cfg.counters):
        raise MachineError(f"Configuration {cfg} does not fit a {machine.n}-counter machine")
    instruction = machine.delta.get(cfg.state)
    if instruction is None:
        raise MachineError(f"State '{cfg.state}' is halting; there is no next configuration")
    i = instruction.counter - 1
    counters = list(cfg.counters)
    if isinstance(instruction, Inc):
        counters[i] += 1
        return Configuration(instruction.target, tuple(counters))
    if counters[i] == 0:
        return Configuration(instruction.on_zero, cfg.counters)
    counters[i] -= 1
    return Configuration(instruction.on_nonzero, tuple(counters))


def run(machine: CounterMachine, max_steps: int) -> Trace:
    """
    Run ``machine`` from (init, 0...0) for at most ``max_steps`` steps.

    Args:
        machine: The machine.
        max_steps: Step budget, at least 1.

    Returns:
        The trace, flagged halted when it ends in a halting state.
    """
    if max_steps < 1:
        raise MachineError(f"max_steps must be positive, got {max_steps}")
    cfg = machine.initial_configuration
    configurations = [cfg]
    for _ in range(max_steps):
        if machine.is_halting(cfg.state):
            break
        cfg = nxt(machine, cfg)
        configurations.append(cfg)
    halted = machine.is_halting(cfg.state)
    if halted:
        logger.info(f"Machine halted in state '{cfg.state}' after {len(configurations) - 1} steps")
    else:
        logger.info(f"Machine still running after {max_steps} steps (state '{cfg.state}')")
    return Trace(tuple(configurations), halted)


def _counter_index(token: str, lineno: int, source: Optional[str]) -> int:
    if not token.isdigit():
        raise FileFormatError(f"counter index '{token}' is not a positive integer", lineno, source)
    return int(token)


def parse_machine(text: str, source: Optional[str] = None) -> CounterMachine:
    """
    Parse the machine text format::

        counters 1
        states qinit q1 q2 q3
        init qinit
        qinit inc 1 q1
        q1 test 1 q3 q2

    Raises:
        FileFormatError: On malformed lines, with the line number.
        MachineError: If the parsed machine is inconsistent.
    """
    n = None
    states: Optional[List[str]] = None
    init = None
    transitions: List[Tuple[str, Instruction]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "counters":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise FileFormatError("expected 'counters <n>'", lineno, source)
            n = int(tokens[1])
        elif head == "states":
            if len(tokens) < 2:
                raise FileFormatError("'states' needs at least one name", lineno, source)
            states = tokens[1:]
        elif head == "init":
            if len(tokens) != 2:
                raise FileFormatError("expected 'init <state>'", lineno, source)
            init = tokens[1]
        elif len(tokens) >= 2 and tokens[1] == "inc":
            if len(tokens) != 4:
                raise FileFormatError("expected '<state> inc <i> <target>'", lineno, source)
            transitions.append((head, Inc(_counter_index(tokens[2], lineno, source), tokens[3])))
        elif len(tokens) >= 2 and tokens[1] == "test":
            if len(tokens) != 5:
                raise FileFormatError("expected '<state> test <i> <on_zero> <on_nonzero>'", lineno, source)
            transitions.append((head, Test(_counter_index(tokens[2], lineno, source), tokens[3], tokens[4])))
        else:
            raise FileFormatError(f"unrecognised line '{line}'", lineno, source)
    for label, value in (("counters", n), ("states", states), ("init", init)):
        if value is None:
            raise FileFormatError(f"missing '{label}' line", None, source)
    try:
        machine = CounterMachine(n, tuple(states), init, tuple(transitions))
    except MachineError as exc:
        if source:
            raise MachineError(f"{source}: {exc}") from exc
        raise
    logger.info(f"Loaded {n}-counter machine with {len(states)} states "
                f"({len(machine.halting_states)} halting)")
    return machine


def load_machine(path: Union[str, Path]) -> CounterMachine:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"cannot read file: {exc}", None, str(path)) from exc
    return parse_machine(text, source=str(path))


def format_machine(machine: CounterMachine) -> str:
    lines = [
        f"counters {machine.n}",
        "states " + " ".join(machine.states),
        f"init {machine.init}",
    ]
    lines.extend(f"{state} {instruction}" for state, instruction in machine.transitions)
    return "\n".join(lines) + "\n"


def configurations_from(items: Iterable[Tuple]) -> Tuple[Configuration, ...]:
    """Build configurations from (state, c1, ..., cn) tuples."""
    return tuple(Configuration(item[0], tuple(item[1:])) for item in items)
