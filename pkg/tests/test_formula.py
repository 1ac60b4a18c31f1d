import random

import pytest

from densesat.formula import (
    EMPTY_SET,
    ParseError,
    atom,
    bottom,
    box,
    classical_subformulas,
    conj,
    depth,
    diamond,
    fset,
    implies,
    length,
    neg,
    parse,
    print_formula,
    subformulas,
    top,
)
from conftest import random_formula


def test_parse_constants_and_sugar():
    assert parse("bot") is bottom()
    assert parse("<>p") is neg(box(neg(atom("p"))))
    assert parse("[] [] p -> [] p") is neg(conj(box(box(atom("p"))), neg(box(atom("p")))))
    assert parse("top") is neg(bottom())
    assert parse("p | q") is neg(conj(neg(atom("p")), neg(atom("q"))))


def test_parse_precedence_and_associativity():
    p, q, r = atom("p"), atom("q"), atom("r")
    assert parse("~p & q") is conj(neg(p), q)
    assert parse("p & q | r") is neg(conj(neg(conj(p, q)), neg(r)))
    assert parse("p -> q -> r") is implies(p, implies(q, r))
    assert parse("[]p & q") is conj(box(p), q)
    assert parse("<> p & q") is conj(diamond(p), q)
    assert parse("(p)") is p


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse("p & (q |)")
    assert exc.value.line == 1
    assert exc.value.col == 9
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError):
        parse("p ? q")
    with pytest.raises(ParseError) as exc:
        parse("p &\n& q")
    assert exc.value.line == 2


def test_print_canonical_forms():
    assert print_formula(bottom()) == "bot"
    assert print_formula(box(atom("p"))) == "[](p)"
    assert print_formula(neg(conj(atom("p"), atom("q")))) == "~((p)&(q))"


def test_print_parse_roundtrip_random(rng):
    for _ in range(1000):
        f = random_formula(rng, 3, rng.randint(1, 12))
        assert parse(print_formula(f)) is f


def _depth_oracle(f):
    if f.kind in ("bot", "atom"):
        return 0
    if f.kind == "conj":
        return max(_depth_oracle(f.left), _depth_oracle(f.right))
    if f.kind == "box":
        return 1 + _depth_oracle(f.left)
    return _depth_oracle(f.left)


def _length_oracle(f):
    if f.kind in ("bot", "atom"):
        return 1
    if f.kind == "conj":
        return _length_oracle(f.left) + _length_oracle(f.right)
    return 1 + _length_oracle(f.left)


def test_depth_length_examples():
    assert depth(atom("p")) == 0 and depth(bottom()) == 0
    assert depth(box(box(atom("p")))) == 2
    assert depth(conj(box(atom("p")), atom("q"))) == 1
    assert length(atom("p")) == 1 and length(bottom()) == 1
    assert length(box(neg(atom("p")))) == 3
    assert length(conj(atom("p"), atom("q"))) == 2


def test_depth_length_against_structural_oracle(rng):
    for _ in range(1000):
        f = random_formula(rng, 3, rng.randint(1, 12))
        assert depth(f) == _depth_oracle(f)
        assert length(f) == _length_oracle(f)


def test_set_metrics_extend_by_max_and_sum():
    s = fset([box(atom("p")), atom("q")])
    assert depth(s) == 1
    assert length(s) == 2 + 1
    assert depth(EMPTY_SET) == 0
    assert length(EMPTY_SET) == 0


def test_subformulas():
    p, q = atom("p"), atom("q")
    assert subformulas(fset([box(p)])) is fset([box(p), p])
    f = conj(p, neg(box(q)))
    assert subformulas(fset([f])) is fset([f, p, neg(box(q)), box(q), q])
    assert subformulas(EMPTY_SET) is EMPTY_SET


def test_subformulas_idempotent(rng):
    for _ in range(100):
        s = fset([random_formula(rng, 2, rng.randint(1, 9)) for _ in range(3)])
        sf = subformulas(s)
        assert subformulas(sf) is sf


def test_classical_subformulas_stop_at_box():
    p, q = atom("p"), atom("q")
    f = conj(p, neg(box(q)))
    # the box node is kept, its child is not descended into; roots included
    assert classical_subformulas(fset([f])) is fset([f, p, neg(box(q)), box(q)])
    assert classical_subformulas(fset([box(p)])) is fset([box(p)])
    assert classical_subformulas(fset([neg(neg(p))])) is fset([neg(neg(p)), neg(p), p])


def test_interning_identity_and_order():
    a = conj(atom("p"), atom("q"))
    b = conj(atom("p"), atom("q"))
    assert a is b
    assert conj(atom("q"), atom("p")) is not a  # structural, not commutative
    s1 = fset([atom("q"), atom("p"), atom("q")])
    assert len(s1) == 2
    assert [f.text for f in s1] == ["p", "q"]  # canonical text order
    assert fset([atom("p"), atom("q")]) is s1


def test_set_operations():
    p, q, r = atom("p"), atom("q"), atom("r")
    s = fset([p, q])
    assert s.union(fset([r])) is fset([p, q, r])
    assert s.union(fset([p])) is s
    assert s.difference(fset([p])) is fset([q])
    assert s.add(r) is fset([p, q, r])
    assert p in s and r not in s


def test_atom_name_validation():
    with pytest.raises(ValueError):
        atom("bot")
    with pytest.raises(ValueError):
        atom("top")
    with pytest.raises(ValueError):
        atom("P")
    assert atom("p_1") is parse("p_1")


def test_top_is_not_an_atom():
    assert parse("top") is neg(bottom())
    assert parse(print_formula(parse("top"))) is parse("top")
