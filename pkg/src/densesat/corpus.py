"""Corpus generation: the exhaustive desk-scale band plus seeded randoms.

The exhaustive band enumerates every core formula over a fixed atom pool up
to a node-count size cap and a modal-depth cap, deduplicated up to the
canonical form in which the arguments of & are in canonical text order.
(The node count charges 1 per connective; the degree-blind |.| metric of
`formula.length`, under which & is free, is unusable as an enumeration cap:
it admits combinatorially many formulas per size.)
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .formula import Formula, atom, bottom, box, conj, neg, parse

CORPUS_FORMAT = "densesat-corpus"
CORPUS_VERSION = 1

DEFAULT_MAX_SIZE = 7
DEFAULT_MAX_DEPTH = 2
DEFAULT_ATOMS = ("p", "q")
DEFAULT_RANDOM_COUNT = 40
DEFAULT_RANDOM_DEPTH = 3
DEFAULT_RANDOM_SIZE = 10


def node_count(f: Formula) -> int:
    if f.kind in ("bot", "atom"):
        return 1
    if f.kind == "conj":
        return 1 + node_count(f.left) + node_count(f.right)
    return 1 + node_count(f.left)


def exhaustive_corpus(
    max_size: int = DEFAULT_MAX_SIZE,
    max_depth: int = DEFAULT_MAX_DEPTH,
    atoms: tuple[str, ...] = DEFAULT_ATOMS,
) -> list[Formula]:
    """Every canonical-form core formula with node count <= max_size and
    modal depth <= max_depth, in canonical text order."""
    leaves = [bottom()] + [atom(a) for a in atoms]
    by_size: dict[int, list[Formula]] = {1: sorted(leaves, key=lambda f: f.text)}
    for size in range(2, max_size + 1):
        layer: dict[int, Formula] = {}
        for f in by_size[size - 1]:
            layer.setdefault(neg(f).idx, neg(f))
            if f.depth < max_depth:
                layer.setdefault(box(f).idx, box(f))
        for ls in range(1, size - 1):
            rs = size - 1 - ls
            if rs < ls:
                break
            for a in by_size[ls]:
                for b in by_size[rs]:
                    if ls == rs and a.text > b.text:
                        continue
                    g = conj(a, b)
                    layer.setdefault(g.idx, g)
        by_size[size] = sorted(layer.values(), key=lambda f: f.text)
    out: list[Formula] = []
    for size in range(1, max_size + 1):
        out.extend(by_size[size])
    return sorted(out, key=lambda f: f.text)


def random_formulas(
    seed: int,
    count: int = DEFAULT_RANDOM_COUNT,
    max_depth: int = DEFAULT_RANDOM_DEPTH,
    max_size: int = DEFAULT_RANDOM_SIZE,
    atoms: tuple[str, ...] = DEFAULT_ATOMS,
    exclude: frozenset[int] = frozenset(),
) -> list[Formula]:
    """Deterministic random formulas (duplicates and `exclude` members are
    redrawn, insertion order)."""
    rng = random.Random(seed)
    leaves = [bottom()] + [atom(a) for a in atoms]

    def grow(depth_budget: int, size_budget: int) -> Formula:
        if size_budget <= 1:
            return rng.choice(leaves)
        ops = ["leaf", "neg", "neg", "conj", "conj"]
        if depth_budget > 0:
            ops += ["box", "box", "box"]
        op = rng.choice(ops)
        if op == "leaf":
            return rng.choice(leaves)
        if op == "neg":
            return neg(grow(depth_budget, size_budget - 1))
        if op == "box":
            return box(grow(depth_budget - 1, size_budget - 1))
        split = rng.randint(1, size_budget - 2) if size_budget > 2 else 1
        return conj(grow(depth_budget, split), grow(depth_budget, size_budget - 1 - split))

    out: list[Formula] = []
    seen: set[int] = set(exclude)
    while len(out) < count:
        f = grow(max_depth, rng.randint(2, max_size))
        if f.idx not in seen:
            seen.add(f.idx)
            out.append(f)
    return out


@dataclass
class CorpusSpec:
    max_size: int = DEFAULT_MAX_SIZE
    max_depth: int = DEFAULT_MAX_DEPTH
    atoms: tuple[str, ...] = DEFAULT_ATOMS
    seed: int = 0
    random_count: int = DEFAULT_RANDOM_COUNT
    random_depth: int = DEFAULT_RANDOM_DEPTH
    random_size: int = DEFAULT_RANDOM_SIZE


def build_corpus(spec: CorpusSpec) -> tuple[list[Formula], list[Formula]]:
    exhaustive = exhaustive_corpus(spec.max_size, spec.max_depth, spec.atoms)
    extra = random_formulas(
        spec.seed,
        spec.random_count,
        spec.random_depth,
        spec.random_size,
        spec.atoms,
        exclude=frozenset(f.idx for f in exhaustive),
    )
    return exhaustive, extra


def corpus_to_json(spec: CorpusSpec, exhaustive: list[Formula], extra: list[Formula]) -> dict:
    return {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "max_size": spec.max_size,
        "max_depth": spec.max_depth,
        "atoms": list(spec.atoms),
        "seed": spec.seed,
        "exhaustive": [f.text for f in exhaustive],
        "random": [f.text for f in extra],
    }


def corpus_dumps(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def load_corpus(data: dict) -> list[Formula]:
    if data.get("format") != CORPUS_FORMAT:
        raise ValueError("not a densesat corpus file")
    return [parse(t) for t in data["exhaustive"]] + [parse(t) for t in data["random"]]
