"""Semantic ground truth: Kripke models, model checking, density checking,
bounded brute-force satisfiability, the budgeted naive tableau, and a
terminating reference solver for plain K."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .ccs import box_minus, diamonds, enumerate_ccs
from .formula import (
    ATOM,
    BOT,
    CONJ,
    NEG,
    Formula,
    FormulaSet,
    atoms_of,
    fset,
    neg,
    parse,
)
from . import modelscan

MODEL_FORMAT = "densesat-model"
MODEL_VERSION = 1


class UnknownWorldError(ValueError):
    pass


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[int, ...]
    relation: frozenset[tuple[int, int]]
    valuation: dict[str, frozenset[int]]

    def __post_init__(self):
        ws = set(self.worlds)
        for x, y in self.relation:
            if x not in ws or y not in ws:
                raise ValueError(f"relation pair ({x},{y}) references a missing world")
        for a, vs in self.valuation.items():
            if not vs <= ws:
                raise ValueError(f"valuation of {a!r} leaves the world set")

    def successors(self, w: int) -> list[int]:
        return sorted(y for x, y in self.relation if x == w)

    def to_json(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "worlds": list(self.worlds),
            "relation": sorted([x, y] for x, y in self.relation),
            "valuation": {a: sorted(vs) for a, vs in sorted(self.valuation.items()) if vs},
        }

    @staticmethod
    def from_json(data: dict) -> "KripkeModel":
        return KripkeModel(
            worlds=tuple(data["worlds"]),
            relation=frozenset((x, y) for x, y in data["relation"]),
            valuation={a: frozenset(vs) for a, vs in data.get("valuation", {}).items()},
        )


def model_check(model: KripkeModel, world: int, f: Formula | FormulaSet) -> bool:
    """Standard clauses; a FormulaSet is checked as the conjunction of its
    members."""
    if world not in model.worlds:
        raise UnknownWorldError(f"world {world} not in the model")
    memo: dict[tuple[int, int], bool] = {}
    if isinstance(f, FormulaSet):
        return all(_mc(model, world, g, memo) for g in f)
    return _mc(model, world, f, memo)


def _mc(model: KripkeModel, w: int, f: Formula, memo: dict) -> bool:
    key = (w, f.idx)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if f.kind == BOT:
        res = False
    elif f.kind == ATOM:
        res = w in model.valuation.get(f.name, frozenset())
    elif f.kind == NEG:
        res = not _mc(model, w, f.left, memo)
    elif f.kind == CONJ:
        res = _mc(model, w, f.left, memo) and _mc(model, w, f.right, memo)
    else:  # BOX
        res = all(_mc(model, y, f.left, memo) for x, y in model.relation if x == w)
    memo[key] = res
    return res


def is_n_dense(model: KripkeModel, n: int) -> bool:
    """R subset R^n, with R^n computed by iterated composition."""
    if n < 1:
        raise ValueError("density index must be >= 1")
    index = {w: i for i, w in enumerate(model.worlds)}
    rows = [0] * len(model.worlds)
    for x, y in model.relation:
        rows[index[x]] |= 1 << index[y]
    rn = rows
    for _ in range(n - 1):
        rn = [_row_compose(rows[i], rn) for i in range(len(rows))]
    return all(rows[i] & ~rn[i] == 0 for i in range(len(rows)))


def _row_compose(row: int, rn: list[int]) -> int:
    acc = 0
    j = 0
    while row:
        if row & 1:
            acc |= rn[j]
        row >>= 1
        j += 1
    return acc


# ---------------------------------------------------------------------------
# Brute-force bounded satisfiability


def model_from_code(w: int, rel_code: int, val_code: int, atoms: tuple[str, ...]) -> KripkeModel:
    relation = frozenset(
        (i, j) for i in range(w) for j in range(w) if (rel_code >> (i * w + j)) & 1
    )
    valuation = {
        a: frozenset(i for i in range(w) if (val_code >> (k * w + i)) & 1)
        for k, a in enumerate(atoms)
    }
    return KripkeModel(tuple(range(w)), relation, valuation)


def brute_force_sat(
    f: Formula, n: int, max_worlds: int = 4
) -> Optional[tuple[KripkeModel, int]]:
    """Exhaustively search n-dense models of size <= max_worlds for f.

    Returns the canonically first (model, world) making f true, or None if
    none exists at this size.  Enumeration order: world count ascending,
    relation code ascending, valuation code ascending (over the atoms of f),
    world index ascending.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be >= 1")
    atoms = atoms_of(f)
    hit = modelscan.batch_search([f], n, max_worlds, atoms)[0]
    if hit is None:
        return None
    w, rel, val, world = hit
    return model_from_code(w, rel, val, atoms), world


# ---------------------------------------------------------------------------
# Budgeted naive tableau (diamond expansion + intermediary insertion)

SATURATED = "saturated"
CLOSED = "closed"
EXHAUSTED = "exhausted"


@dataclass
class TableauResult:
    status: str
    model: Optional[KripkeModel] = None
    root: Optional[int] = None


@dataclass
class _Tab:
    labels: list[FormulaSet]
    edges: list[tuple[int, int]]
    edge_set: set[tuple[int, int]]
    queue: deque
    created: int

    def copy(self) -> "_Tab":
        return _Tab(
            list(self.labels), list(self.edges), set(self.edge_set), deque(self.queue), self.created
        )


def naive_tableau(s: FormulaSet, n: int, budget: int = 10_000) -> TableauResult:
    """The nonterminating textbook procedure, run under a node-creation
    budget with backtracking over the nondeterministic picks.

    Obligations (unwitnessed diamonds; edges without an n-step path) are
    processed first-in-first-out; the choice tree is walked depth-first
    with an explicit stack, since branches routinely outgrow the call
    stack before the budget bites.  Saturation returns the induced model,
    which is n-dense by construction; exhaustion carries no verdict.
    """
    if n < 2:
        raise ValueError("density index must be >= 2")
    exhausted = False

    def has_n_path(tab: _Tab, a: int, b: int) -> bool:
        frontier = {a}
        for _ in range(n):
            frontier = {y for x in frontier for (x2, y) in tab.edges if x2 == x}
            if not frontier:
                return False
        return b in frontier

    def new_node(tab: _Tab, u: FormulaSet) -> Optional[int]:
        nonlocal exhausted
        if tab.created + 1 > budget:
            exhausted = True
            return None
        tab.created += 1
        tab.labels.append(u)
        w = len(tab.labels) - 1
        for d in diamonds(u):
            tab.queue.append(("dia", w, d))
        return w

    def add_edge(tab: _Tab, a: int, b: int) -> None:
        if (a, b) not in tab.edge_set:
            tab.edges.append((a, b))
            tab.edge_set.add((a, b))
            tab.queue.append(("edge", a, b))

    def dia_children(tab: _Tab, w: int, want: FormulaSet):
        for u in enumerate_ccs(want):
            t2 = tab.copy()
            y = new_node(t2, u)
            if y is None:
                return
            add_edge(t2, w, y)
            yield t2

    def edge_children(tab: _Tab, a: int, b: int, picked: tuple[FormulaSet, ...]):
        if len(picked) == n - 1:
            if not box_minus(picked[-1]).issubset(tab.labels[b]):
                return
            t2 = tab.copy()
            prev = a
            for u in picked:
                y = new_node(t2, u)
                if y is None:
                    return
                add_edge(t2, prev, y)
                prev = y
            add_edge(t2, prev, b)
            yield t2
            return
        prev = tab.labels[a] if not picked else picked[-1]
        for u in enumerate_ccs(box_minus(prev)):
            yield from edge_children(tab, a, b, picked + (u,))

    def expand(tab: _Tab):
        # pop satisfied obligations; return the choice stream of the first
        # live one, or None when the tableau is saturated
        while tab.queue:
            kind, x, y = tab.queue.popleft()
            if kind == "dia":
                want = fset([neg(y.left.left)]).union(box_minus(tab.labels[x]))
                if any(
                    (x, z) in tab.edge_set and want.issubset(tab.labels[z])
                    for z in range(len(tab.labels))
                ):
                    continue
                return dia_children(tab, x, want)
            if has_n_path(tab, x, y):
                continue
            return edge_children(tab, x, y, ())
        return None

    def root_children():
        for root in enumerate_ccs(s):
            tab = _Tab([], [], set(), deque(), 0)
            if new_node(tab, root) is None:
                return
            yield tab

    stack = [root_children()]
    while stack:
        tab = next(stack[-1], None)
        if tab is None:
            stack.pop()
            continue
        choices = expand(tab)
        if choices is None:
            atoms = sorted({f.name for u in tab.labels for f in u if f.kind == ATOM})
            model = KripkeModel(
                tuple(range(len(tab.labels))),
                frozenset(tab.edge_set),
                {a: frozenset(w for w, u in enumerate(tab.labels) if _has_atom(u, a)) for a in atoms},
            )
            return TableauResult(SATURATED, model, 0)
        stack.append(choices)
    return TableauResult(EXHAUSTED if exhausted else CLOSED)


def _has_atom(u: FormulaSet, name: str) -> bool:
    return any(f.kind == ATOM and f.name == name for f in u)


# ---------------------------------------------------------------------------
# Terminating reference solver for plain K

_KSAT: dict[int, bool] = {}


def k_sat(f: Formula | str) -> bool:
    """Satisfiability in plain K: diamond expansion with box propagation,
    recursing on modal depth (no density rule, hence no loops)."""
    if isinstance(f, str):
        f = parse(f)
    return _k_sat_set(fset([f]))


def _k_sat_set(s: FormulaSet) -> bool:
    cached = _KSAT.get(s.idx)
    if cached is not None:
        return cached
    res = False
    for u in enumerate_ccs(s):
        if all(_k_sat_set(fset([neg(d.left.left)]).union(box_minus(u))) for d in diamonds(u)):
            res = True
            break
    _KSAT[s.idx] = res
    return res
