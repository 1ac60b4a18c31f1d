"""Classically Consistent Saturations.

A finite formula set u is a CCS iff it is closed under the classical
decomposition rules, bot-free, and clash-free:

  * f&g in u       =>  f in u and g in u
  * ~(f&g) in u    =>  ~f in u or ~g in u
  * ~~f in u       =>  f in u
  * bot not in u
  * ~f in u        =>  f not in u

`u in CCS(s)` is realized throughout as `is_ccs(u) and s.issubset(u)`.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterator

from .formula import (
    BOT,
    BOX,
    CONJ,
    NEG,
    Formula,
    FormulaSet,
    fset,
    neg,
    subformulas,
)

_IS_CCS: dict[int, bool] = {}
_BOX_MINUS: dict[int, FormulaSet] = {}
_DIAMONDS: dict[int, tuple[Formula, ...]] = {}
_ENUM: dict[tuple[int, bool], tuple[FormulaSet, ...]] = {}


def is_ccs(u: FormulaSet) -> bool:
    """True iff all five closure conditions hold."""
    cached = _IS_CCS.get(u.idx)
    if cached is not None:
        return cached
    ok = _check_ccs(u)
    _IS_CCS[u.idx] = ok
    return ok


def _check_ccs(u: FormulaSet) -> bool:
    for f in u.items:
        if f.kind == BOT:
            return False
        if f.kind == CONJ:
            if f.left not in u or f.right not in u:
                return False
        elif f.kind == NEG:
            if f.left in u:
                return False
            g = f.left
            if g.kind == CONJ:
                if neg(g.left) not in u and neg(g.right) not in u:
                    return False
            elif g.kind == NEG:
                if g.left not in u:
                    return False
    return True


def box_minus(u: FormulaSet) -> FormulaSet:
    """{f : []f in u} — the obligations propagated to every successor."""
    cached = _BOX_MINUS.get(u.idx)
    if cached is None:
        cached = fset(f.left for f in u.items if f.kind == BOX)
        _BOX_MINUS[u.idx] = cached
    return cached


def diamonds(u: FormulaSet) -> tuple[Formula, ...]:
    """The ~[]f members of u, in canonical order."""
    cached = _DIAMONDS.get(u.idx)
    if cached is None:
        cached = tuple(f for f in u.items if f.kind == NEG and f.left.kind == BOX)
        _DIAMONDS[u.idx] = cached
    return cached


def enumerate_ccs(s: FormulaSet, exhaustive: bool = False) -> Iterator[FormulaSet]:
    """Yield, in canonical order, the minimal saturations u with s subset u
    (the open branches of a classical tableau over s, deduplicated).

    Yields nothing iff s is classically inconsistent.  With `exhaustive`,
    yields instead every CCS u with s subset u drawn from SF(s) and the
    negations of SF(s); this is a differential-debugging fallback and is
    exponential in |SF(s)|.
    """
    key = (s.idx, exhaustive)
    cached = _ENUM.get(key)
    if cached is None:
        found = _enumerate_exhaustive(s) if exhaustive else _enumerate_minimal(s)
        cached = tuple(sorted(found, key=lambda u: u.key))
        _ENUM[key] = cached
    return iter(cached)


def _enumerate_minimal(s: FormulaSet) -> set[FormulaSet]:
    out: set[FormulaSet] = set()
    ids0: set[int] = set()
    members0: dict[int, Formula] = {}

    def add(f: Formula, ids: set[int], members: dict[int, Formula]) -> bool:
        # returns False on an immediate clash / bot
        if f.idx in ids:
            return True
        if f.kind == BOT:
            return False
        if neg(f).idx in ids:
            return False
        if f.kind == NEG and f.left.idx in ids:
            return False
        ids.add(f.idx)
        members[f.idx] = f
        return True

    def expand(ids: set[int], members: dict[int, Formula]) -> None:
        while True:
            pending = None
            for f in sorted(members.values(), key=lambda g: g.text):
                if f.kind == CONJ and (f.left.idx not in ids or f.right.idx not in ids):
                    pending = ("conj", f)
                    break
                if f.kind == NEG:
                    g = f.left
                    if g.kind == NEG and g.left.idx not in ids:
                        pending = ("negneg", f)
                        break
                    if g.kind == CONJ and neg(g.left).idx not in ids and neg(g.right).idx not in ids:
                        pending = ("negconj", f)
                        break
            if pending is None:
                out.add(fset(members.values()))
                return
            rule, f = pending
            if rule == "conj":
                if add(f.left, ids, members) and add(f.right, ids, members):
                    continue
                return
            if rule == "negneg":
                if add(f.left.left, ids, members):
                    continue
                return
            # negconj: branch on ~left first, then ~right
            for child in (neg(f.left.left), neg(f.left.right)):
                ids2 = set(ids)
                members2 = dict(members)
                if add(child, ids2, members2):
                    expand(ids2, members2)
            return

    for f in s.items:
        if not add(f, ids0, members0):
            return set()
    expand(ids0, members0)
    return out


def _enumerate_exhaustive(s: FormulaSet) -> set[FormulaSet]:
    sf = subformulas(s)
    pool = sorted(
        {g.idx: g for f in sf.items for g in (f, neg(f)) if g.idx not in s.ids}.values(),
        key=lambda g: g.text,
    )
    if len(pool) > 20:
        raise ValueError(f"exhaustive CCS enumeration over {len(pool)} candidates refused")
    out: set[FormulaSet] = set()
    for r in range(len(pool) + 1):
        for extra in combinations(pool, r):
            u = fset(s.items + extra)
            if s.issubset(u) and is_ccs(u):
                out.add(u)
    return out
