"""The guarded-box translation relativizing every box to a fresh atom.

tau_p maps K-validity to dense-validity: tau_p(q)=q, tau_p commutes with
the classical connectives, and tau_p([]f) = [](p -> tau_p(f)).  The guard
implication is emitted in core form ~(p & ~tau_p(f)), which costs 4 extra
length units per box; the paper's 5*|f| size bound therefore survives the
desugaring unchanged.
"""

from __future__ import annotations

from .formula import ATOM, BOT, BOX, CONJ, Formula, atom, box, conj, neg


class AtomOccursError(ValueError):
    """The guard atom must be fresh for the translated formula."""


def tau(p: str, f: Formula) -> Formula:
    guard = atom(p)
    if _occurs(p, f):
        raise AtomOccursError(f"atom {p!r} occurs in {f.text}")
    return _tau(guard, f, {})


def _occurs(p: str, f: Formula) -> bool:
    stack = [f]
    seen = set()
    while stack:
        g = stack.pop()
        if g.idx in seen:
            continue
        seen.add(g.idx)
        if g.kind == ATOM and g.name == p:
            return True
        if g.left is not None:
            stack.append(g.left)
        if g.right is not None:
            stack.append(g.right)
    return False


def _tau(guard: Formula, f: Formula, memo: dict[int, Formula]) -> Formula:
    got = memo.get(f.idx)
    if got is not None:
        return got
    if f.kind in (BOT, ATOM):
        out = f
    elif f.kind == CONJ:
        out = conj(_tau(guard, f.left, memo), _tau(guard, f.right, memo))
    elif f.kind == BOX:
        out = box(neg(conj(guard, neg(_tau(guard, f.left, memo)))))
    else:
        out = neg(_tau(guard, f.left, memo))
    memo[f.idx] = out
    return out


def tau_size_check(p: str, f: Formula) -> bool:
    """|tau_p(f)| <= 5*|f| in the core encoding."""
    return tau(p, f).length <= 5 * f.length
