"""
Machine package.

Deterministic counter machines, single steps and bounded runs.
"""

from .machine import (
    Configuration,
    CounterMachine,
    Inc,
    Instruction,
    Test,
    Trace,
    configurations_from,
    format_machine,
    load_machine,
    nxt,
    parse_machine,
    run,
)

__all__ = [
    'Configuration',
    'CounterMachine',
    'Inc',
    'Instruction',
    'Test',
    'Trace',
    'configurations_from',
    'format_machine',
    'load_machine',
    'nxt',
    'parse_machine',
    'run',
]
