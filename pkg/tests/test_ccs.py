import random

from densesat.ccs import box_minus, enumerate_ccs, is_ccs
from densesat.formula import EMPTY_SET, atom, bottom, box, conj, fset, neg, parse
from densesat.semantics import KripkeModel, model_check
from conftest import random_formula


def test_is_ccs_examples():
    assert is_ccs(fset([atom("p"), neg(atom("q"))]))
    assert not is_ccs(fset([bottom()]))
    assert not is_ccs(fset([conj(atom("p"), atom("q")), atom("p")]))  # missing q


def test_is_ccs_each_clause():
    p, q = atom("p"), atom("q")
    assert not is_ccs(fset([neg(conj(p, q))]))  # no disjunct chosen
    assert is_ccs(fset([neg(conj(p, q)), neg(p)]))
    assert not is_ccs(fset([neg(neg(p))]))  # double negation not unfolded
    assert is_ccs(fset([neg(neg(p)), p]))
    assert not is_ccs(fset([p, neg(p)]))  # clash
    assert is_ccs(EMPTY_SET)


def test_box_minus_examples():
    p, q, r = atom("p"), atom("q"), atom("r")
    assert box_minus(fset([box(p), neg(box(q)), r])) is fset([p])
    assert box_minus(EMPTY_SET) is EMPTY_SET
    assert box_minus(fset([box(conj(p, q)), box(p)])) is fset([conj(p, q), p])


def test_enumerate_ccs_examples():
    p, q = atom("p"), atom("q")
    assert list(enumerate_ccs(fset([bottom()]))) == []
    assert list(enumerate_ccs(fset([p]))) == [fset([p])]
    two = list(enumerate_ccs(fset([neg(conj(p, q))])))
    assert two == sorted(
        [fset([neg(conj(p, q)), neg(p)]), fset([neg(conj(p, q)), neg(q)])],
        key=lambda u: u.key,
    )


def test_enumerate_ccs_outputs_are_ccs_supersets(rng):
    ratios = []
    for _ in range(300):
        s = fset([random_formula(rng, 2, rng.randint(1, 8))])
        for u in enumerate_ccs(s):
            assert is_ccs(u)
            assert s.issubset(u)
            ratios.append(u.length / max(s.length, 1))
    # |u| is linear in |s|; record the measured constant
    print(f"\nmeasured CCS length ratio: max {max(ratios):.2f}, mean {sum(ratios)/len(ratios):.2f}")
    assert max(ratios) <= 4.0


def test_enumerate_ccs_deterministic():
    s = fset([parse("~(p & q) & (p | q)")])
    a = [u.key for u in enumerate_ccs(s)]
    b = [u.key for u in enumerate_ccs(s)]
    assert a == b
    assert a == sorted(a)


def _random_model(rng: random.Random, atoms=("p", "q")) -> KripkeModel:
    k = rng.randint(1, 3)
    worlds = tuple(range(k))
    rel = frozenset(
        (i, j) for i in worlds for j in worlds if rng.random() < 0.5
    )
    val = {a: frozenset(w for w in worlds if rng.random() < 0.5) for a in atoms}
    return KripkeModel(worlds, rel, val)


def test_dnf_equivalence_against_models(rng):
    # s is true at a world iff some enumerated saturation of it is
    models = [_random_model(rng) for _ in range(200)]
    for _ in range(500):
        f = random_formula(rng, 2, rng.randint(1, 6))
        s = fset([f])
        sats = list(enumerate_ccs(s))
        model, w = rng.choice(models), 0
        direct = model_check(model, w, f)
        via_ccs = any(all(model_check(model, w, g) for g in u) for u in sats)
        assert direct == via_ccs, f.text


def test_proposition_items(rng):
    # closure-composition facts used throughout the window algebra
    for _ in range(200):
        s = fset([random_formula(rng, 1, rng.randint(1, 5))])
        s_prime = fset([random_formula(rng, 1, rng.randint(1, 5))])
        for v in enumerate_ccs(s_prime):
            # item 1: saturating on top of a saturation lands in CCS(s + s')
            for u in enumerate_ccs(s.union(v)):
                assert is_ccs(u)
                assert s.union(s_prime).issubset(u)
        for u in enumerate_ccs(s.union(s_prime)):
            # item 2: u decomposes into saturations of the two parts
            found = any(
                any(v.union(v2).issubset(u) for v2 in enumerate_ccs(s_prime))
                for v in enumerate_ccs(s)
            )
            assert found


def test_proposition_item4_exact(rng):
    # d(u \ v) <= d(s') for u in CCS(s' united v), v a CCS
    for _ in range(200):
        s_prime = fset([random_formula(rng, 2, rng.randint(1, 5))])
        base = fset([random_formula(rng, 1, rng.randint(1, 4))])
        for v in enumerate_ccs(base):
            for u in enumerate_ccs(s_prime.union(v)):
                assert u.difference(v).depth <= s_prime.depth


def test_exhaustive_mode_contains_minimal():
    s = fset([parse("~(p & q)")])
    minimal = set(enumerate_ccs(s))
    full = set(enumerate_ccs(s, exhaustive=True))
    assert minimal <= full
    for u in full:
        assert is_ccs(u) and s.issubset(u)
    # exhaustive also carries non-minimal supersets
    assert any(u not in minimal for u in full)
