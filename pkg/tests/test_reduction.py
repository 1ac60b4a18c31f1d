import pytest

from densesat.formula import atom, box, conj, length, neg, parse
from densesat.reduction import AtomOccursError, tau, tau_size_check
from densesat.semantics import k_sat
from densesat.solver import UNSATISFIABLE, DenseSolver, SolverConfig
from conftest import random_formula


def test_tau_examples():
    q = atom("q")
    assert tau("p", q) is q
    assert tau("p", box(q)) is box(neg(conj(atom("p"), neg(q))))  # [](p -> q)
    inner = tau("p", box(q))
    assert tau("p", box(box(q))) is box(neg(conj(atom("p"), neg(inner))))


def test_tau_commutes_with_classical_connectives():
    f = parse("~(q & r)")
    assert tau("p", f) is parse("~((q)&(r))")
    assert tau("p", parse("bot")) is parse("bot")


def _occurs(name, f):
    if f.kind == "atom":
        return f.name == name
    return any(_occurs(name, c) for c in (f.left, f.right) if c is not None)


def test_tau_freshness_guard(rng):
    with pytest.raises(AtomOccursError):
        tau("p", conj(atom("p"), atom("q")))
    with pytest.raises(AtomOccursError):
        tau("q", box(atom("q")))
    for _ in range(50):
        f = random_formula(rng, 2, rng.randint(1, 8))
        for name in ("p", "q"):
            if _occurs(name, f):
                with pytest.raises(AtomOccursError):
                    tau(name, f)


def test_tau_size_examples():
    assert tau_size_check("p", atom("q"))
    assert tau_size_check("p", box(atom("q")))
    # each box costs 4 in core form where the original cost 1, so 5|f| holds
    assert length(tau("p", box(atom("q")))) == length(tau("p", atom("q"))) + 4
    assert length(tau("p", box(atom("q")))) == 5


def test_tau_size_property(rng):
    # the 5|f| bound survives the core desugaring (each box costs +4)
    for _ in range(500):
        f = random_formula(rng, 3, rng.randint(1, 10))
        assert tau_size_check("z", f)


def test_validity_transfer_sample(rng):
    # K-validity of f iff dense-validity of tau_z(f), desk scale
    solver = DenseSolver(SolverConfig(density=2))
    for _ in range(120):
        f = random_formula(rng, 2, rng.randint(1, 7))
        k_valid = not k_sat(neg(f))
        dense_tau_valid = solver.sat_formula(neg(tau("z", f))).status == UNSATISFIABLE
        assert k_valid == dense_tau_valid, f.text
