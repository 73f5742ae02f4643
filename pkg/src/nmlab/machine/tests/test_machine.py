"""
Tests for counter machines: stepping, runs and the text format.
"""

import pytest

from nmlab import machine as cm
from nmlab.errors import FileFormatError, MachineError
from nmlab.machine import (
    Configuration,
    CounterMachine,
    Inc,
    configurations_from,
    format_machine,
    load_machine,
    nxt,
    parse_machine,
    run,
)


class TestSampleMachines:
    def test_one_counter_trace(self, one_counter):
        trace = run(one_counter, 100)
        assert trace.halted
        assert trace.configurations == configurations_from(
            [("qinit", 0), ("q1", 1), ("q2", 0), ("q3", 0)])
        assert len(trace) == 4
        assert trace.last.state == "q3"

    def test_two_counter_prefix(self, two_counter):
        trace = run(two_counter, 8)
        assert trace.configurations == configurations_from([
            ("qinit", 0, 0), ("q1", 1, 0), ("q2", 1, 1), ("q3", 0, 1), ("qinit", 1, 1),
            ("q1", 2, 1), ("q2", 2, 2), ("q3", 1, 2), ("qinit", 2, 2),
        ])

    def test_two_counter_does_not_halt(self, two_counter):
        trace = run(two_counter, 10_000)
        assert not trace.halted
        assert len(trace) == 10_001

    def test_halting_states(self, one_counter, two_counter):
        assert one_counter.halting_states == ("q3",)
        assert two_counter.halting_states == ("q4",)


class TestStep:
    def test_increment(self, one_counter):
        assert nxt(one_counter, Configuration("qinit", (5,))) == Configuration("q1", (6,))

    def test_test_on_zero_keeps_counters(self, one_counter):
        assert nxt(one_counter, Configuration("q1", (0,))) == Configuration("q3", (0,))

    def test_test_on_nonzero_decrements(self, one_counter):
        assert nxt(one_counter, Configuration("q1", (3,))) == Configuration("q2", (2,))

    def test_halting_state_has_no_successor(self, one_counter):
        with pytest.raises(MachineError):
            nxt(one_counter, Configuration("q3", (0,)))

    def test_wrong_counter_count(self, one_counter):
        with pytest.raises(MachineError):
            nxt(one_counter, Configuration("qinit", (0, 0)))

    def test_run_needs_positive_budget(self, one_counter):
        with pytest.raises(MachineError):
            run(one_counter, 0)


class TestValidation:
    @pytest.mark.parametrize("kwargs", [
        dict(n=0, states=("q",), init="q"),
        dict(n=1, states=(), init="q"),
        dict(n=1, states=("q", "q"), init="q"),
        dict(n=1, states=("q",), init="r"),
        dict(n=1, states=("q",), init="q", transitions=(("r", Inc(1, "q")),)),
        dict(n=1, states=("q",), init="q", transitions=(("q", Inc(2, "q")),)),
        dict(n=1, states=("q",), init="q", transitions=(("q", cm.Test(1, "q", "r")),)),
        dict(n=1, states=("q",), init="q", transitions=(("q", Inc(1, "q")), ("q", Inc(1, "q")))),
    ])
    def test_rejected(self, kwargs):
        with pytest.raises(MachineError):
            CounterMachine(**kwargs)


class TestTextFormat:
    def test_round_trip(self, two_counter):
        assert parse_machine(format_machine(two_counter)) == two_counter

    def test_instruction_text(self):
        assert str(Inc(1, "q1")) == "inc 1 q1"
        assert str(cm.Test(2, "q3", "q4")) == "test 2 q3 q4"
        assert str(Configuration("q1", (1, 0))) == "(q1, 1, 0)"

    @pytest.mark.parametrize("text, line", [
        ("counters x\n", 1),
        ("counters 1\nstates\n", 2),
        ("counters 1\nstates q\ninit q\nq inc one q\n", 4),
        ("counters 1\nstates q\ninit q\nq test 1 q\n", 4),
        ("counters 1\nstates q\ninit q\nq jump q\n", 4),
    ])
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(FileFormatError) as excinfo:
            parse_machine(text, source="bad.cm")
        assert excinfo.value.line == line

    def test_missing_init(self):
        with pytest.raises(FileFormatError, match="init"):
            parse_machine("counters 1\nstates q\n")

    def test_inconsistent_machine_reports_source(self):
        with pytest.raises(MachineError, match="bad.cm"):
            parse_machine("counters 1\nstates q\ninit q\nq inc 1 r\n", source="bad.cm")

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(FileFormatError):
            load_machine(tmp_path / "none.cm")
