"""
Shared pytest fixtures: sample files, the two sample machines and seeded
random formula / Nmatrix factories.
"""

import random
from itertools import product
from pathlib import Path

import pytest

from nmlab.formula_core import Application, Signature, Variable
from nmlab.machine import load_machine
from nmlab.semantics import Interpretation, Nmatrix, load_nmatrix

SAMPLE_DIR = Path(__file__).resolve().parent / "sample_inputs"


def _random_formula(rng: random.Random, signature: Signature, var_names, max_depth: int = 4):
    leaves = [Variable(name) for name in var_names]
    leaves += [Application(conn) for conn, arity in signature.items if arity == 0]
    inner = [(conn, arity) for conn, arity in signature.items if arity > 0]

    def build(depth):
        if depth == 0 or not inner or rng.random() < 0.3:
            return rng.choice(leaves)
        conn, arity = rng.choice(inner)
        return Application(conn, tuple(build(depth - 1) for _ in range(arity)))

    return build(max_depth)


def _random_nmatrix(rng: random.Random, n_values: int, signature: Signature,
                    deterministic: bool = False, max_cell: int = 2) -> Nmatrix:
    values = [f"v{i}" for i in range(n_values)]
    designated = [v for v in values if rng.random() < 0.5]
    interpretations = {}
    for conn, arity in signature.items:
        rows = []
        for args in product(values, repeat=arity):
            size = 1 if deterministic else rng.randint(1, min(max_cell, n_values))
            rows.append((args, rng.sample(values, size)))
        interpretations[conn] = Interpretation(arity, rows)
    return Nmatrix(values, designated, interpretations, name="random")


@pytest.fixture
def random_formula():
    return _random_formula


@pytest.fixture
def random_nmatrix():
    return _random_nmatrix


@pytest.fixture
def sample_dir() -> Path:
    return SAMPLE_DIR


@pytest.fixture
def luk3() -> Nmatrix:
    return load_nmatrix(SAMPLE_DIR / "luk3.nmx")


@pytest.fixture
def luk3_noneg() -> Nmatrix:
    return load_nmatrix(SAMPLE_DIR / "luk3_noneg.nmx")


@pytest.fixture
def nonsubst() -> Nmatrix:
    return load_nmatrix(SAMPLE_DIR / "nonsubst.nmx")


@pytest.fixture
def nonsubst_prime() -> Nmatrix:
    return load_nmatrix(SAMPLE_DIR / "nonsubst_prime.nmx")


@pytest.fixture(scope="session")
def one_counter():
    return load_machine(SAMPLE_DIR / "one_counter.cm")


@pytest.fixture(scope="session")
def two_counter():
    return load_machine(SAMPLE_DIR / "two_counter.cm")
