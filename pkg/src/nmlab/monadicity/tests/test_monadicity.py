"""
Tests for the clone fixpoint, the bounded separator search and separator
set verification.
"""

import random
from itertools import combinations

import pytest

from nmlab.errors import NmlabError, NotDeterministicError
from nmlab.formula_core import Signature, Variable, parse_formula
from nmlab.monadicity import (
    Verdict,
    decide_monadicity_matrix,
    distinct_pairs,
    enumerate_monadic_formulas,
    fresh_variable,
    monadic_strata,
    search_separators,
    unary_clone,
    verify_separator_set,
)
from nmlab.semantics import Interpretation, Nmatrix, separates


def f(text, nmatrix):
    return parse_formula(text, nmatrix.signature)


class TestClone:
    def test_negation_free_fragment(self, luk3_noneg):
        clone = unary_clone(luk3_noneg)
        assert clone.functions == {
            ("0", "half", "1"): Variable("p"),
            ("1", "1", "1"): f("imp(p,p)", luk3_noneg),
        }
        assert clone.rounds == 2
        assert ("1", "1", "1") in clone
        assert len(clone) == 2

    def test_full_luk3(self, luk3):
        clone = unary_clone(luk3)
        assert clone.witness(("1", "half", "0")) == f("neg(p)", luk3)
        assert ("0", "0", "0") in clone

    def test_requires_determinism(self, nonsubst):
        with pytest.raises(NotDeterministicError):
            unary_clone(nonsubst)

    def test_constants_enter_the_clone(self):
        matrix = Nmatrix.from_functions(["a", "b"], ["b"], {"k": (0, lambda: "b")})
        clone = unary_clone(matrix)
        assert clone.witness(("b", "b")).text == "k"


class TestDecideMatrix:
    def test_luk3_is_monadic(self, luk3):
        report = decide_monadicity_matrix(luk3)
        assert report.verdict is Verdict.MONADIC
        assert report.certified
        assert report.witnesses[("0", "half")] == f("neg(p)", luk3)
        assert report.witnesses[("0", "1")] == Variable("p")
        assert [s.text for s in report.separators] == ["p", "neg(p)"]

    def test_negation_free_fragment_is_not(self, luk3_noneg):
        report = decide_monadicity_matrix(luk3_noneg)
        assert report.verdict is Verdict.NOT_MONADIC
        assert report.uncovered == (("0", "half"),)
        assert report.formulas_enumerated == 2

    def test_empty_designated_set(self):
        matrix = Nmatrix.from_functions(["a", "b"], [], {"s": (1, lambda x: x)})
        assert decide_monadicity_matrix(matrix).verdict is Verdict.NOT_MONADIC

    def test_single_value(self):
        matrix = Nmatrix.from_functions(["a"], ["a"], {"s": (1, lambda x: x)})
        report = decide_monadicity_matrix(matrix)
        assert report.verdict is Verdict.MONADIC
        assert distinct_pairs(matrix) == []


class TestEnumeration:
    def test_order(self):
        signature = Signature.of({"s": 1, "g": 2})
        texts = [formula.text for formula in enumerate_monadic_formulas(signature, 3)]
        assert texts == ["p", "s(p)", "g(p,p)", "s(s(p))"]

    def test_stratum_sizes(self):
        signature = Signature.of({"c": 0, "g": 2})
        sizes = [len(stratum) for _, stratum, _ in monadic_strata(signature, 5, Variable("p"))]
        assert sizes == [2, 0, 4, 0, 16]

    def test_fresh_variable(self):
        assert fresh_variable(Signature.of({"g": 2})) == Variable("p")
        assert fresh_variable(Signature.of({"p": 0, "p_1": 1})) == Variable("p_2")

    def test_pruning_needs_nmatrix(self):
        with pytest.raises(NmlabError):
            list(monadic_strata(Signature.of({"g": 2}), 3, Variable("p"), prune=True))


class TestSearch:
    def test_example_prime_is_monadic(self, nonsubst_prime):
        report = search_separators(nonsubst_prime, 6)
        assert report.verdict is Verdict.MONADIC
        assert not report.certified
        assert report.witnesses == {
            ("a", "b"): f("g(p,g(p,p))", nonsubst_prime),
            ("a", "c"): Variable("p"),
            ("b", "c"): Variable("p"),
        }
        assert report.formulas_enumerated == 4

    def test_example_is_unknown(self, nonsubst):
        report = search_separators(nonsubst, 6)
        assert report.verdict is Verdict.UNKNOWN
        assert ("a", "b") in report.uncovered
        assert report.budget == 6

    @pytest.mark.parametrize("designated", [c for r in range(4) for c in combinations("abc", r)])
    def test_nonsubst_for_every_designated_set(self, nonsubst, designated):
        nmatrix = Nmatrix(nonsubst.values, designated, nonsubst.interpretations, name="nonsubst")
        report = search_separators(nmatrix, 6)
        assert report.verdict is Verdict.UNKNOWN
        assert set(report.witnesses.values()) <= {Variable("p")}

    def test_search_never_says_not_monadic(self, luk3_noneg):
        report = search_separators(luk3_noneg, 5)
        assert report.verdict is Verdict.UNKNOWN
        assert report.uncovered == (("0", "half"),)

    def test_single_value(self):
        matrix = Nmatrix(["a"], ["a"], {"g": Interpretation(2, [(("a", "a"), ("a",))])})
        report = search_separators(matrix, 3)
        assert report.verdict is Verdict.MONADIC
        assert report.formulas_enumerated == 0

    def test_budget_must_be_positive(self, luk3):
        with pytest.raises(NmlabError):
            search_separators(luk3, 0)

    def test_threads_give_same_answer(self, nonsubst_prime, luk3):
        for nmatrix in (nonsubst_prime, luk3):
            serial = search_separators(nmatrix, 6)
            threaded = search_separators(nmatrix, 6, jobs=2)
            assert threaded.verdict is serial.verdict
            assert threaded.witnesses == serial.witnesses

    def test_witnesses_separate(self, random_nmatrix):
        rng = random.Random(3)
        signature = Signature.of({"c": 0, "s": 1, "g": 2})
        for _ in range(20):
            nmatrix = random_nmatrix(rng, 3, signature)
            report = search_separators(nmatrix, 5)
            for (a, b), witness in report.witnesses.items():
                assert separates(nmatrix, witness, a, b), witness.text

    def test_budget_monotone(self, random_nmatrix):
        rng = random.Random(17)
        signature = Signature.of({"s": 1, "g": 2})
        for _ in range(20):
            nmatrix = random_nmatrix(rng, 3, signature)
            smaller = search_separators(nmatrix, 4)
            larger = search_separators(nmatrix, 6)
            assert smaller.witnesses.items() <= larger.witnesses.items()

    @pytest.mark.parametrize("connectives", [
        {"c": 0, "g": 2},
        {"c": 0, "s": 1, "g": 2},
        {"s": 1, "h": 3},
    ])
    def test_pruning_keeps_coverage(self, random_nmatrix, connectives):
        rng = random.Random(2024)
        signature = Signature.of(connectives)
        for _ in range(50):
            nmatrix = random_nmatrix(rng, rng.randint(2, 4), signature)
            pruned = search_separators(nmatrix, 7)
            full = search_separators(nmatrix, 7, prune=False)
            assert pruned.verdict is full.verdict
            assert set(pruned.witnesses) == set(full.witnesses)

    def test_pruning_with_identity_diagonal(self, random_nmatrix):
        # g(x, x) = x makes g(p,p) a pointwise-singleton copy of p
        rng = random.Random(7)
        signature = Signature.of({"s": 1, "g": 2})
        for _ in range(50):
            base = random_nmatrix(rng, rng.randint(2, 4), signature)
            rows = [(args, (args[0],) if args[0] == args[1] else cell) for args, cell in base.cells("g")]
            nmatrix = Nmatrix(base.values, base.designated,
                              {"s": base.interpretations["s"], "g": Interpretation(2, rows)})
            pruned = search_separators(nmatrix, 7)
            full = search_separators(nmatrix, 7, prune=False)
            assert pruned.verdict is full.verdict
            assert set(pruned.witnesses) == set(full.witnesses)

    def test_agrees_with_clone_on_matrices(self, random_nmatrix):
        rng = random.Random(99)
        signature = Signature.of({"s": 1, "g": 2})
        for _ in range(30):
            matrix = random_nmatrix(rng, 3, signature, deterministic=True)
            exact = decide_monadicity_matrix(matrix)
            found = search_separators(matrix, 5)
            if found.verdict is Verdict.MONADIC:
                assert exact.verdict is Verdict.MONADIC
            if exact.verdict is Verdict.MONADIC and all(w.size <= 5 for w in exact.witnesses.values()):
                assert found.verdict is Verdict.MONADIC
            assert set(found.witnesses) <= set(exact.witnesses)


class TestVerifySeparators:
    def test_complete_set(self, luk3):
        report = verify_separator_set(luk3, [f("p", luk3), f("neg(p)", luk3)])
        assert report.ok
        assert report.coverage[("0", "half")] == f("neg(p)", luk3)

    def test_incomplete_set(self, luk3):
        report = verify_separator_set(luk3, [f("p", luk3)])
        assert not report.ok
        assert report.uncovered == (("0", "half"),)

    def test_rejects_two_variables(self, luk3):
        with pytest.raises(NmlabError):
            verify_separator_set(luk3, [f("or(p,q)", luk3)])

    def test_closed_separator(self):
        matrix = Nmatrix.from_functions(["a", "b"], ["b"], {"k": (0, lambda: "b")})
        report = verify_separator_set(matrix, [parse_formula("k", matrix.signature)])
        assert not report.ok
