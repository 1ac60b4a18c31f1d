import random

import pytest

from densesat.formula import Formula, atom, bottom, box, conj, neg


def random_formula(rng: random.Random, depth: int, size: int, atoms=("p", "q")) -> Formula:
    """Seeded random core formula with modal depth <= depth and roughly
    `size` connectives."""
    if size <= 1:
        return rng.choice([bottom()] + [atom(a) for a in atoms])
    ops = ["neg", "conj"] + (["box"] if depth > 0 else [])
    op = rng.choice(ops)
    if op == "neg":
        return neg(random_formula(rng, depth, size - 1, atoms))
    if op == "box":
        return box(random_formula(rng, depth - 1, size - 1, atoms))
    left = rng.randint(1, max(1, size - 2))
    return conj(
        random_formula(rng, depth, left, atoms),
        random_formula(rng, depth, size - 1 - left, atoms),
    )


@pytest.fixture
def rng():
    return random.Random(20240811)
