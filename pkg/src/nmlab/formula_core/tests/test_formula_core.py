"""
Tests for the formula core: parsing, printing, subformula DAGs.
"""

import random

import pytest

from nmlab.errors import FormulaSyntaxError, SignatureError
from nmlab.formula_core import (
    Application,
    Signature,
    Variable,
    format_formula,
    format_formula_infix,
    formula_size,
    ordered_variables,
    parse_formula,
    subformula_dag,
    substitute,
    variables,
)

SIGMA_C = Signature.of({"zero": 0, "eps": 0, "suc": 1, "step_qinit": 2, "step_q1": 2})
G_SIG = Signature.of({"g": 2})


def _brute_subterms(formula):
    found = set()

    def walk(node):
        found.add(node)
        if isinstance(node, Application):
            for arg in node.args:
                walk(arg)

    walk(formula)
    return found


class TestSignature:
    def test_duplicate_name_rejected(self):
        with pytest.raises(SignatureError):
            Signature((("g", 2), ("g", 1)))

    def test_negative_arity_rejected(self):
        with pytest.raises(SignatureError):
            Signature.of({"g": -1})

    def test_lookup(self):
        assert SIGMA_C.arity("suc") == 1
        assert SIGMA_C.arity("p") is None
        assert "zero" in SIGMA_C
        assert len(SIGMA_C) == 5


class TestParse:
    def test_nested_constant(self):
        assert parse_formula("suc(zero)", SIGMA_C) == Application("suc", (Application("zero"),))

    def test_unknown_identifier_is_variable(self):
        assert parse_formula("p", SIGMA_C) == Variable("p")

    def test_whitespace_ignored(self):
        assert parse_formula(" g ( p , g(p,p) ) ", G_SIG) == parse_formula("g(p,g(p,p))", G_SIG)

    def test_separator_from_example(self):
        formula = parse_formula("g(p,g(p,p))", G_SIG)
        dag = subformula_dag(formula)
        assert [format_formula(node) for node in dag.nodes] == ["p", "g(p,p)", "g(p,g(p,p))"]

    @pytest.mark.parametrize("text", ["", "g(", "g(p,)", "g(p p)", "1p", "g(p,p))", "g()"])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(text, G_SIG)

    def test_syntax_error_reports_position(self):
        with pytest.raises(FormulaSyntaxError) as excinfo:
            parse_formula("g(p,)", G_SIG)
        assert excinfo.value.position is not None
        assert "position" in str(excinfo.value)

    def test_arity_mismatch(self):
        with pytest.raises(SignatureError):
            parse_formula("g(p)", G_SIG)

    def test_nullary_used_with_arguments(self):
        with pytest.raises(SignatureError):
            parse_formula("zero(p)", SIGMA_C)

    def test_connective_used_bare(self):
        with pytest.raises(SignatureError):
            parse_formula("suc", SIGMA_C)

    def test_unknown_connective_applied(self):
        with pytest.raises(SignatureError):
            parse_formula("h(p)", G_SIG)


class TestFormat:
    def test_round_trip_random_terms(self, random_formula):
        rng = random.Random(7)
        sig = Signature.of({"g": 2, "s": 1, "c": 0, "h": 3})
        for _ in range(1000):
            formula = random_formula(rng, sig, ["p", "q", "r"], max_depth=5)
            assert parse_formula(format_formula(formula), sig) == formula

    def test_nullary_printed_bare(self):
        assert format_formula(parse_formula("step_q1(eps,zero)", SIGMA_C)) == "step_q1(eps,zero)"

    def test_deep_chain_does_not_recurse(self):
        formula = Application("zero")
        for _ in range(5000):
            formula = Application("suc", (formula,))
        text = format_formula(formula)
        assert text.startswith("suc(suc(") and text.endswith("zero" + ")" * 5000)
        assert len(subformula_dag(formula).nodes) == 5001

    def test_infix_rendering(self):
        sig = Signature.of({"neg": 1, "imp": 2})
        formula = parse_formula("imp(neg(p),p)", sig)
        assert format_formula_infix(formula, {"neg": "¬", "imp": "→"}) == "(¬p → p)"
        assert format_formula_infix(formula) == "(neg p imp p)"


class TestSubformulas:
    def test_example_formula(self):
        dag = subformula_dag(parse_formula("g(g(p,p),p)", G_SIG))
        assert [format_formula(node) for node in dag.nodes] == ["p", "g(p,p)", "g(g(p,p),p)"]
        assert dag.children == ((), (0, 0), (1, 0))

    def test_single_variable(self):
        dag = subformula_dag(Variable("p"))
        assert len(dag.nodes) == 1
        assert dag.root == 0

    def test_dag_matches_brute_force(self, random_formula):
        rng = random.Random(11)
        sig = Signature.of({"g": 2, "s": 1, "c": 0})
        for _ in range(300):
            formula = random_formula(rng, sig, ["p", "q"], max_depth=5)
            dag = subformula_dag(formula)
            assert set(dag.nodes) == _brute_subterms(formula)
            assert len(dag.nodes) == len(set(dag.nodes))
            assert len(dag.nodes) <= formula_size(formula)
            for i, kids in enumerate(dag.children):
                assert all(k < i for k in kids)
            for i in range(len(dag.nodes) - 1):
                assert any(i in kids for kids in dag.children[i + 1:])

    def test_shared_roots(self):
        first = parse_formula("g(p,q)", G_SIG)
        second = parse_formula("g(q,g(p,q))", G_SIG)
        dag = subformula_dag(first, second)
        assert len(dag.nodes) == 4
        assert dag.nodes[dag.roots[0]] == first
        assert dag.nodes[dag.roots[1]] == second


class TestVariables:
    def test_closed_formula(self):
        assert variables(parse_formula("suc(zero)", SIGMA_C)) == frozenset()

    def test_monadic_formula(self):
        assert variables(parse_formula("g(p,g(p,p))", G_SIG)) == {Variable("p")}

    def test_first_occurrence_order(self):
        formula = parse_formula("g(g(r,p),g(q,r))", G_SIG)
        assert ordered_variables(formula) == (Variable("r"), Variable("p"), Variable("q"))


class TestEquality:
    def test_structural_equality(self):
        assert parse_formula("g(p,p)", G_SIG) == Application("g", (Variable("p"), Variable("p")))
        assert parse_formula("g(p,q)", G_SIG) != parse_formula("g(q,p)", G_SIG)
        assert hash(parse_formula("g(p,q)", G_SIG)) == hash(parse_formula("g(p,q)", G_SIG))

    def test_size(self):
        assert formula_size(parse_formula("g(p,g(p,p))", G_SIG)) == 5
        assert formula_size(Variable("p")) == 1

    def test_substitution_respects_equality(self, random_formula):
        rng = random.Random(3)
        for _ in range(100):
            left = random_formula(rng, G_SIG, ["p", "q"], max_depth=4)
            right = parse_formula(format_formula(left), G_SIG)
            image = random_formula(rng, G_SIG, ["r"], max_depth=3)
            mapping = {Variable("p"): image}
            assert substitute(left, mapping) == substitute(right, mapping)

    def test_substitution_result(self):
        formula = parse_formula("g(p,q)", G_SIG)
        result = substitute(formula, {Variable("p"): parse_formula("g(q,q)", G_SIG)})
        assert format_formula(result) == "g(g(q,q),q)"
