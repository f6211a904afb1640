"""Shared fixtures: bundled models, golden files and random generators."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from ptegkit import (
    MAXPLUS,
    TropicalMatrix,
    build_combined,
    extract_matrices,
    normalize,
    parse_matrix,
    parse_model,
)

REPO = Path(__file__).resolve().parent.parent
MODELS = REPO / "models"
GOLDEN = Path(__file__).resolve().parent / "golden"


def load_model(name: str):
    return parse_model((MODELS / name).read_text(encoding="utf-8"))


def load_golden_matrix(name: str) -> TropicalMatrix:
    return parse_matrix((GOLDEN / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def running_model():
    return load_model("running.pteg")


@pytest.fixture(scope="session")
def running_mod_model():
    return load_model("running-mod.pteg")


@pytest.fixture(scope="session")
def electro_model():
    return load_model("electro.pteg")


@pytest.fixture(scope="session")
def running_bundle(running_model):
    return extract_matrices(normalize(running_model))


@pytest.fixture(scope="session")
def running_mod_bundle(running_mod_model):
    return extract_matrices(normalize(running_mod_model))


@pytest.fixture(scope="session")
def electro_bundle(electro_model):
    return extract_matrices(normalize(electro_model))


@pytest.fixture(scope="session")
def running_cm(running_bundle):
    return build_combined(running_bundle)


@pytest.fixture(scope="session")
def running_mod_cm(running_mod_bundle):
    return build_combined(running_mod_bundle)


@pytest.fixture(scope="session")
def electro_cm(electro_bundle):
    return build_combined(electro_bundle)


def random_matrix(rng: random.Random, n: int, tag=MAXPLUS, density: float = 0.7,
                  lo: int = -9, hi: int = 9) -> TropicalMatrix:
    """Random square integer matrix with the given arc density."""
    zero = tag.zero
    rows = [
        [rng.randint(lo, hi) if rng.random() < density else zero for _ in range(n)]
        for _ in range(n)
    ]
    return TropicalMatrix.from_rows(rows, tag)


def random_irreducible(rng: random.Random, n: int, tag=MAXPLUS, density: float = 0.4,
                       lo: int = -9, hi: int = 9) -> TropicalMatrix:
    """Random matrix whose precedence graph is strongly connected.

    A random permutation cycle through all nodes guarantees strong
    connectivity; extra arcs are sprinkled on top.
    """
    m = random_matrix(rng, n, tag, density, lo, hi).to_rows()
    order = list(range(n))
    rng.shuffle(order)
    for idx in range(n):
        j = order[idx]
        i = order[(idx + 1) % n]
        m[i][j] = rng.randint(lo, hi)  # arc j -> i
    return TropicalMatrix.from_rows(m, tag)


def random_nondiverging(rng: random.Random, n: int, tag=MAXPLUS) -> TropicalMatrix:
    """Random matrix with a finite Kleene star: all arc weights pushed to
    the safe sign so that no circuit can diverge."""
    hi = 0 if tag is MAXPLUS else None
    rows = [
        [
            (rng.randint(-9, 0) if tag is MAXPLUS else rng.randint(0, 9))
            if rng.random() < 0.5
            else tag.zero
            for _ in range(n)
        ]
        for _ in range(n)
    ]
    return TropicalMatrix.from_rows(rows, tag)


def random_model_text(rng: random.Random, n_transitions: int) -> str:
    """Random valid model.

    Zero-token places only go forward in a random topological order, which
    rules out token-free circuits, and every zero-token window contains
    the gap between fixed per-transition potentials, so the same-step
    constraint system stays satisfiable.  A cycle of one-token places
    keeps the graph connected.
    """
    names = [f"t{i}" for i in range(n_transitions)]
    order = list(range(n_transitions))
    rng.shuffle(order)
    position = {t: k for k, t in enumerate(order)}
    potential = [3 * position[t] for t in range(n_transitions)]
    lines = ["pteg random", "transitions " + " ".join(names)]
    pid = 0

    def add_tokened_place(src: int, dst: int, tokens: int):
        nonlocal pid
        lo = rng.randint(0, 6)
        hi = lo + rng.randint(0, 6)
        lines.append(
            f"place p{pid} from {names[src]} to {names[dst]} tokens {tokens} "
            f"interval {lo} {hi}"
        )
        pid += 1

    def add_zero_place(src: int, dst: int):
        nonlocal pid
        gap = potential[dst] - potential[src]
        lo = rng.randint(0, gap)
        hi = gap + rng.randint(0, 6)
        lines.append(
            f"place p{pid} from {names[src]} to {names[dst]} tokens 0 "
            f"interval {lo} {hi}"
        )
        pid += 1

    for i in range(n_transitions):
        add_tokened_place(i, (i + 1) % n_transitions, rng.choice((1, 1, 2)))
    for _ in range(rng.randint(0, 2 * n_transitions)):
        a, b = rng.sample(range(n_transitions), 2)
        if position[a] < position[b]:
            add_zero_place(a, b)
        else:
            add_zero_place(b, a)
    for _ in range(rng.randint(0, n_transitions)):
        a, b = rng.sample(range(n_transitions), 2) if n_transitions > 1 else (0, 0)
        add_tokened_place(a, b, rng.choice((1, 2)))
    return "\n".join(lines) + "\n"
