"""Interned modal formulas over the core connectives bot, atoms, ~, &, [].

Disjunction, implication, diamond and top are parse-time sugar; every value
of :class:`Formula` is sugar-free.  Structurally equal formulas are the same
object, so equality, hashing and set membership are O(1).

The intern tables are append-only and safe for concurrent reads; appends
are serialized by a lock.  Formulas and formula sets are immutable.
"""

from __future__ import annotations

import re
import threading
from typing import Iterable, Iterator

BOT = "bot"
ATOM = "atom"
NEG = "neg"
CONJ = "conj"
BOX = "box"

_LOCK = threading.Lock()
_FORMULAS: dict[tuple, "Formula"] = {}
_SETS: dict[frozenset, "FormulaSet"] = {}


class Formula:
    """A node of the interned syntax tree.  Do not construct directly; use
    :func:`bottom`, :func:`atom`, :func:`neg`, :func:`conj`, :func:`box`."""

    __slots__ = ("kind", "name", "left", "right", "idx", "text", "depth", "length")

    kind: str
    name: str | None
    left: "Formula | None"
    right: "Formula | None"
    idx: int
    text: str
    depth: int
    length: int

    def __repr__(self) -> str:
        return f"Formula({self.text})"

    def __str__(self) -> str:
        return self.text


def _intern(kind: str, name: str | None, left: Formula | None, right: Formula | None) -> Formula:
    key = (kind, name, None if left is None else left.idx, None if right is None else right.idx)
    f = _FORMULAS.get(key)
    if f is not None:
        return f
    with _LOCK:
        f = _FORMULAS.get(key)
        if f is not None:
            return f
        f = Formula.__new__(Formula)
        f.kind = kind
        f.name = name
        f.left = left
        f.right = right
        if kind == BOT:
            f.text, f.depth, f.length = "bot", 0, 1
        elif kind == ATOM:
            f.text, f.depth, f.length = name, 0, 1
        elif kind == NEG:
            f.text, f.depth, f.length = f"~({left.text})", left.depth, 1 + left.length
        elif kind == BOX:
            f.text, f.depth, f.length = f"[]({left.text})", 1 + left.depth, 1 + left.length
        else:  # CONJ
            f.text = f"({left.text})&({right.text})"
            f.depth = max(left.depth, right.depth)
            f.length = left.length + right.length
        f.idx = len(_FORMULAS)
        _FORMULAS[key] = f
        return f


_ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


def bottom() -> Formula:
    return _intern(BOT, None, None, None)


def atom(name: str) -> Formula:
    if name in ("bot", "top") or not _ATOM_RE.match(name):
        raise ValueError(f"invalid atom name: {name!r}")
    return _intern(ATOM, name, None, None)


def neg(f: Formula) -> Formula:
    return _intern(NEG, None, f, None)


def conj(left: Formula, right: Formula) -> Formula:
    return _intern(CONJ, None, left, right)


def box(f: Formula) -> Formula:
    return _intern(BOX, None, f, None)


def top() -> Formula:
    return neg(bottom())


def diamond(f: Formula) -> Formula:
    """<>f, i.e. ~[]~f."""
    return neg(box(neg(f)))


def disj(left: Formula, right: Formula) -> Formula:
    """left | right, i.e. ~(~left & ~right)."""
    return neg(conj(neg(left), neg(right)))


def implies(left: Formula, right: Formula) -> Formula:
    """left -> right, i.e. ~(left & ~right)."""
    return neg(conj(left, neg(right)))


def print_formula(f: Formula) -> str:
    """Canonical fully parenthesized text; parse(print_formula(f)) is f."""
    return f.text


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<arrow>->)|(?P<box>\[\])|(?P<dia><>)"
    r"|(?P<name>[a-z][a-zA-Z0-9_]*)|(?P<punct>[~&|()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    toks = []
    line, linestart = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - linestart + 1)
        col = m.start() - linestart + 1
        if m.lastgroup == "ws":
            line += m.group().count("\n")
            if "\n" in m.group():
                linestart = m.start() + m.group().rindex("\n") + 1
        elif m.lastgroup == "name":
            toks.append(("name", m.group(), line, col))
        else:
            toks.append((m.group(), m.group(), line, col))
        pos = m.end()
    toks.append(("eof", "", line, len(text) - linestart + 1))
    return toks


class _Parser:
    # precedence: ~ / [] / <>  >  &  >  |  >  ->  (-> right-associative)

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self) -> tuple[str, str, int, int]:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str) -> ParseError:
        _, _, line, col = self.toks[self.i]
        return ParseError(msg, line, col)

    def parse(self) -> Formula:
        f = self.imp()
        if self.peek() != "eof":
            raise self.error(f"unexpected token {self.toks[self.i][1]!r}")
        return f

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = disj(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t == "~":
            self.take()
            return neg(self.unary())
        if t == "[]":
            self.take()
            return box(self.unary())
        if t == "<>":
            self.take()
            return diamond(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t == "(":
            self.take()
            f = self.imp()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.take()
            return f
        if t == "name":
            _, name, _, _ = self.take()
            if name == "bot":
                return bottom()
            if name == "top":
                return top()
            return atom(name)
        raise self.error(f"expected a formula, got {self.toks[self.i][1]!r}")


def parse(text: str) -> Formula:
    """Parse `text` into a sugar-free interned formula."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Formula sets


class FormulaSet:
    """Interned, canonically ordered finite set of formulas.

    Iteration order is the canonical order (by canonical text), which is
    stable across runs and processes.
    """

    __slots__ = ("items", "ids", "idx", "depth", "length", "_key")

    items: tuple[Formula, ...]
    ids: frozenset[int]
    idx: int
    depth: int
    length: int

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, f: Formula) -> bool:
        return f.idx in self.ids

    def __repr__(self) -> str:
        return "{" + ", ".join(f.text for f in self.items) + "}"

    @property
    def key(self) -> tuple[str, ...]:
        k = self._key
        if k is None:
            k = self._key = tuple(f.text for f in self.items)
        return k

    def issubset(self, other: "FormulaSet") -> bool:
        return self.ids <= other.ids

    def union(self, other: "FormulaSet") -> "FormulaSet":
        if other.ids <= self.ids:
            return self
        if self.ids <= other.ids:
            return other
        return fset(self.items + other.items)

    def difference(self, other: "FormulaSet") -> "FormulaSet":
        return fset(f for f in self.items if f.idx not in other.ids)

    def add(self, f: Formula) -> "FormulaSet":
        if f.idx in self.ids:
            return self
        return fset(self.items + (f,))


def fset(formulas: Iterable[Formula]) -> FormulaSet:
    """Intern the set of `formulas`."""
    by_id = {f.idx: f for f in formulas}
    ids = frozenset(by_id)
    s = _SETS.get(ids)
    if s is not None:
        return s
    with _LOCK:
        s = _SETS.get(ids)
        if s is not None:
            return s
        s = FormulaSet.__new__(FormulaSet)
        s.items = tuple(sorted(by_id.values(), key=lambda f: f.text))
        s.ids = ids
        s.idx = len(_SETS)
        s.depth = max((f.depth for f in s.items), default=0)
        s.length = sum(f.length for f in s.items)
        s._key = None
        _SETS[ids] = s
        return s


EMPTY_SET = fset(())


def depth(x: Formula | FormulaSet) -> int:
    """Modal degree; extends to sets by maximum (0 for the empty set)."""
    return x.depth


def length(x: Formula | FormulaSet) -> int:
    """|bot|=|p|=1, |~f|=|[]f|=1+|f|, |f&g|=|f|+|g|; extends to sets by sum."""
    return x.length


def subformulas(s: FormulaSet | Formula) -> FormulaSet:
    """SF(s): closure of s under immediate subterms."""
    out: dict[int, Formula] = {}
    stack = [s] if isinstance(s, Formula) else list(s.items)
    while stack:
        f = stack.pop()
        if f.idx in out:
            continue
        out[f.idx] = f
        if f.left is not None:
            stack.append(f.left)
        if f.right is not None:
            stack.append(f.right)
    return fset(out.values())


def classical_subformulas(s: FormulaSet | Formula) -> FormulaSet:
    """CSF(s): like SF but recursion stops at box nodes (the box itself is
    kept, its child is not descended into).  Roots are included."""
    out: dict[int, Formula] = {}
    stack = [s] if isinstance(s, Formula) else list(s.items)
    while stack:
        f = stack.pop()
        if f.idx in out:
            continue
        out[f.idx] = f
        if f.kind == BOX:
            continue
        if f.left is not None:
            stack.append(f.left)
        if f.right is not None:
            stack.append(f.right)
    return fset(out.values())


def atoms_of(s: FormulaSet | Formula) -> tuple[str, ...]:
    """Sorted atom names occurring in s."""
    return tuple(sorted(f.name for f in subformulas(s) if f.kind == ATOM))
