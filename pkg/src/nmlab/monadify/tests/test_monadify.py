"""
Tests for monadification and the halting-to-monadicity reduction built on it.
"""

import pytest

from nmlab.errors import MonadifyError
from nmlab.formula_core import Application, Variable, parse_formula, subformula_dag
from nmlab.machine import run
from nmlab.monadify import (
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
from nmlab.monadicity import distinct_pairs, enumerate_monadic_formulas, verify_separator_set
from nmlab.reduction import ERR, build_nmatrix, conf_name, seq
from nmlab.semantics import Nmatrix, format_nmatrix, infectious_values, parse_nmatrix, separates

ALL_LUK3_M = {"0", "half", "1", "one"}


@pytest.fixture
def luk3_m(luk3):
    return build_monadify(luk3)


def computation(machine):
    return seq(run(machine, 100).configurations)


class TestConstruction:
    def test_values_and_designation(self, luk3_m):
        assert luk3_m.values == ("0", "half", "1", "one")
        assert luk3_m.designated == {"one"}
        assert fresh_value_of(luk3_m) == "one"
        assert luk3_m.name == "luk3_m"

    def test_base_tables_kept(self, luk3_m):
        assert luk3_m.cell("neg", ("0",)) == {"1"}
        assert luk3_m.cell("or", ("1", "0")) == {"1"}
        assert luk3_m.cell("imp", ("0", "half")) == {"1"}

    @pytest.mark.parametrize("conn, args", [
        ("neg", ("one",)),
        ("or", ("one", "0")),
        ("or", ("1", "one")),
        ("imp", ("0", "one")),
    ])
    def test_fresh_input_gives_everything(self, luk3_m, conn, args):
        assert luk3_m.cell(conn, args) == ALL_LUK3_M

    def test_separator_tables(self, luk3_m):
        f0 = separator_connective("0")
        assert f0 == "f_0"
        assert luk3_m.cell(f0, ("0", "1")) == {"one"}
        assert luk3_m.cell(f0, ("half", "1")) == {"0", "half", "1"}
        assert luk3_m.cell(f0, ("0", "half")) == ALL_LUK3_M
        assert luk3_m.cell(f0, ("one", "1")) == ALL_LUK3_M

    def test_fresh_name_avoids_base_values(self):
        assert fresh_value_name(["a", "one"]) == "one_1"
        assert fresh_value_name(["one", "one_1"]) == "one_1_1"
        base = Nmatrix.from_functions(["one", "z"], ["one"], {"s": (1, lambda x: x)})
        assert fresh_value_of(build_monadify(base)) == "one_1"

    def test_clashing_connective(self):
        base = Nmatrix.from_functions(["a", "b"], ["a"], {"f_a": (1, lambda x: x)})
        with pytest.raises(MonadifyError):
            build_monadify(base)

    def test_invalid_connective_name(self):
        base = Nmatrix.from_functions(["a-1", "b"], ["b"], {"s": (1, lambda x: x)})
        with pytest.raises(MonadifyError):
            build_monadify(base)

    def test_text_round_trip(self, luk3_m):
        again = parse_nmatrix(format_nmatrix(luk3_m))
        assert again.values == luk3_m.values
        for conn in luk3_m.interpretations:
            assert list(again.cells(conn)) == list(luk3_m.cells(conn))


class TestMachineInstances:
    @pytest.mark.parametrize("machine_name, values, connectives", [
        ("one_counter", 23, 29),
        ("two_counter", 87, 94),
    ])
    def test_sizes(self, request, machine_name, values, connectives):
        monadified = compile_monadicity_instance(request.getfixturevalue(machine_name))
        assert len(monadified.values) == values
        assert len(monadified.interpretations) == connectives

    def test_preconditions(self, one_counter, luk3):
        assert check_monadify_preconditions(build_nmatrix(one_counter))
        assert not check_monadify_preconditions(luk3)
        single = Nmatrix.from_functions(["e"], [], {"s": (1, lambda x: x)})
        assert not check_monadify_preconditions(single)

    def test_error_no_longer_infectious(self, one_counter):
        monadified = compile_monadicity_instance(one_counter)
        assert ERR not in infectious_values(monadified)
        assert monadified.cell("suc", ("one",)) == set(monadified.values)

    def test_separators_from_the_computation(self, one_counter):
        separators = witness_separators_from_theorem(build_nmatrix(one_counter), computation(one_counter))
        assert separators[0] == Variable("p")
        assert len(separators) == 23
        monadified = compile_monadicity_instance(one_counter)
        report = verify_separator_set(monadified, separators)
        assert report.ok
        assert len(report.coverage) == len(distinct_pairs(monadified)) == 253

    def test_non_theorem_rejected(self, one_counter):
        prefix = seq(run(one_counter, 100).configurations[:3])
        with pytest.raises(MonadifyError, match="not a theorem"):
            witness_separators_from_theorem(build_nmatrix(one_counter), prefix)

    def test_open_formula_rejected(self, luk3):
        with pytest.raises(MonadifyError):
            witness_separators_from_theorem(luk3, parse_formula("imp(p,p)", luk3.signature))

    def test_separators_need_every_value(self, one_counter):
        separators = witness_separators_from_theorem(build_nmatrix(one_counter), computation(one_counter))
        dropped_values = (conf_name("q1", ("r_ge1",)), ERR)
        dropped = {separator_connective(value) for value in dropped_values}
        partial = [s for s in separators if isinstance(s, Variable) or s.connective not in dropped]
        report = verify_separator_set(compile_monadicity_instance(one_counter), partial)
        assert not report.ok
        assert report.uncovered == (dropped_values,)


class TestBase:
    def test_recovers_the_base(self, luk3, luk3_m):
        base = base_of(luk3_m)
        assert base.values == luk3.values
        assert base.designated == luk3.designated
        assert base.name == "luk3"
        for conn in luk3.interpretations:
            assert list(base.cells(conn)) == list(luk3.cells(conn))

    def test_recovers_the_machine_nmatrix(self, one_counter):
        original = build_nmatrix(one_counter)
        base = base_of(compile_monadicity_instance(one_counter))
        assert base.values == original.values
        assert base.designated == original.designated
        assert set(base.interpretations) == set(original.interpretations)
        assert base.cell("suc", ("r_ge0",)) == original.cell("suc", ("r_ge0",))

    def test_rejects_plain_nmatrix(self, luk3):
        with pytest.raises(MonadifyError):
            base_of(luk3)


def small_base():
    """e infectious and undesignated, k a one-node theorem."""
    return Nmatrix.from_functions(
        ["e", "a", "t"], ["t"],
        {
            "k": (0, lambda: ["t"]),
            "s": (1, lambda x: {"e": ["e"], "a": ["a", "t"], "t": ["t"]}[x]),
        },
        name="small",
    )


class TestStarInseparable:
    def test_error_value_of_non_halting_machine(self, two_counter):
        monadified = compile_monadicity_instance(two_counter)
        assert check_star_inseparable(monadified, ERR, 5) is None

    def test_error_value_of_halting_machine(self, one_counter):
        monadified = compile_monadicity_instance(one_counter)
        assert check_star_inseparable(monadified, ERR, 8) is None
        separator = check_star_inseparable(monadified, ERR, 9)
        assert separator == Application(separator_connective(ERR), (Variable("p"), computation(one_counter)))
        assert len(subformula_dag(separator).nodes) == 9
        for b in monadified.values[:-1]:
            if b != ERR:
                assert separates(monadified, separator, ERR, b), b

    def test_agrees_with_enumeration(self):
        monadified = build_monadify(small_base())
        assert check_star_inseparable(monadified, "e", 2) is None
        separator = check_star_inseparable(monadified, "e", 3)
        assert separator.text == "f_e(p,k)"
        found = [
            formula for formula in enumerate_monadic_formulas(monadified.signature, 4)
            if len(subformula_dag(formula).nodes) <= 2
            and any(separates(monadified, formula, "e", b) for b in ("a", "t"))
        ]
        assert found == []
        assert all(separates(monadified, separator, "e", b) for b in ("a", "t"))

    def test_needs_an_infectious_value(self, one_counter):
        monadified = compile_monadicity_instance(one_counter)
        with pytest.raises(MonadifyError):
            check_star_inseparable(monadified, "one", 3)
        with pytest.raises(MonadifyError):
            check_star_inseparable(monadified, "r_eq0", 3)

    def test_unknown_value(self, one_counter):
        with pytest.raises(MonadifyError):
            check_star_inseparable(compile_monadicity_instance(one_counter), "nope", 3)
