"""Recursive windows: the bounded tableau fragments the solver explores.

A window for a pair (u, v0) of CCS packages one successor chain of u:

       w_L -> w_{L-1} -> ... -> w_1 -> w_0 = v0

together with, for every chain edge (w_{t+1}, w_t), a nested window
witnessing that edge one nesting level down.  u is related to every
boundary node w_0, w_{s}, w_{2s}, ... where s = density - 1, so the chain
realizes density: the edge (u, w_{i*s}) is witnessed by the density-step
path through w_{(i+1)*s} ... w_{i*s}.

Node sets are stored as one flat tuple (length * s + 1 nodes); the tuple
grouping used in the density > 2 pictures is recoverable via node_tuple().
For density 2 this degenerates to the familiar single sequence v_0..v_len.

Validity clauses for a (k, length, d)-window with anchor u:

  * k = 0  iff  the window is the empty window;
  * w_L in CCS(box_minus(u));
  * for t < L:  w_t in CCS(base_t + box_minus(w_{t+1})) where base_t is
    box_minus(u) at boundary positions (t divisible by s) and empty
    otherwise;
  * subwindow t is a valid (min(k-1, d(w_{t+1})), d(w_{t+1}), d)-window
    for (w_{t+1}, w_t)  [the nesting budget is capped by the anchor's
    degree so that budget 0 coincides with emptiness].

Membership v in CCS(X) is realized as is_ccs(v) and X subset v throughout.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterator, Optional

from .ccs import box_minus, enumerate_ccs, is_ccs
from .formula import EMPTY_SET, Formula, FormulaSet, fset, neg, parse

_LOCK = threading.Lock()
_WINDOWS: dict[tuple, "Window"] = {}

C_SF = 2  # members live in SF(u) plus negations thereof: |candidates| <= C_SF*|u|


class WindowShapeError(ValueError):
    pass


class ContinuationError(ValueError):
    pass


class Window:
    """Immutable, interned window.  Equality and hashing are identity."""

    __slots__ = ("nodes", "subs", "density", "idx", "_members")

    nodes: tuple[FormulaSet, ...]
    subs: tuple["Window", ...]
    density: int
    idx: int

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    @property
    def length(self) -> int:
        """Number of node tuples spanned (the paper's window length)."""
        return (len(self.nodes) - 1) // (self.density - 1) if self.nodes else 0

    def node_tuple(self, i: int) -> tuple[FormulaSet, ...]:
        """The i-th overlapping density-tuple of chain nodes."""
        s = self.density - 1
        return self.nodes[i * s : i * s + self.density]

    def __repr__(self) -> str:
        if self.is_empty:
            return "Window(empty)"
        return f"Window(len={self.length}, density={self.density}, nodes={list(self.nodes)})"


def make_window(nodes: tuple[FormulaSet, ...], subs: tuple[Window, ...], density: int) -> Window:
    if density < 2:
        raise ValueError("density must be >= 2")
    if nodes:
        s = density - 1
        if (len(nodes) - 1) % s != 0 or len(subs) != len(nodes) - 1:
            raise WindowShapeError(
                f"bad window shape: {len(nodes)} nodes, {len(subs)} subwindows, density {density}"
            )
    elif subs:
        raise WindowShapeError("empty window cannot carry subwindows")
    key = (density, tuple(x.idx for x in nodes), tuple(w.idx for w in subs))
    win = _WINDOWS.get(key)
    if win is not None:
        return win
    with _LOCK:
        win = _WINDOWS.get(key)
        if win is not None:
            return win
        win = Window.__new__(Window)
        win.nodes = nodes
        win.subs = subs
        win.density = density
        win.idx = len(_WINDOWS)
        win._members = None
        _WINDOWS[key] = win
        return win


def empty_window(density: int = 2) -> Window:
    return make_window((), (), density)


@dataclass(frozen=True)
class WindowParams:
    k: int
    length: int
    density: int = 2
    lambda_kind: str = "depth"  # only depth-length windows are materialized

    def __post_init__(self):
        if self.density < 2:
            raise ValueError("density must be >= 2")
        if self.lambda_kind not in ("depth", "chi"):
            raise ValueError(f"unknown lambda family {self.lambda_kind!r}")


def check_window(win: Window, u: FormulaSet, v0: FormulaSet, params: WindowParams) -> bool:
    """True iff all definitional clauses hold for (u, v0) under params."""
    if params.k == 0:
        return win.is_empty
    if win.is_empty or win.density != params.density:
        return False
    if params.length < 1 or params.k > u.depth or params.length < u.depth:
        return False
    s = params.density - 1
    L = params.length * s
    if len(win.nodes) != L + 1:
        return False
    if win.nodes[0] is not v0:
        return False
    bm_u = box_minus(u)
    last = win.nodes[L]
    if not (is_ccs(last) and bm_u.issubset(last)):
        return False
    for t in range(L):
        need = box_minus(win.nodes[t + 1])
        if t % s == 0:
            need = need.union(bm_u)
        v = win.nodes[t]
        if not (is_ccs(v) and need.issubset(v)):
            return False
    for t in range(L):
        anchor = win.nodes[t + 1]
        sub_params = WindowParams(
            min(params.k - 1, anchor.depth), anchor.depth, params.density
        )
        if not check_window(win.subs[t], anchor, win.nodes[t], sub_params):
            return False
    return True


def members(win: Window) -> frozenset[FormulaSet]:
    """The set {W} of member CCS: all chain nodes plus subwindow members."""
    got = win._members
    if got is None:
        acc = set(win.nodes)
        for sub in win.subs:
            acc |= members(sub)
        got = frozenset(acc)
        win._members = got
    return got


def partial(win: Window, a: int, b: int) -> Window:
    """The slice spanning node tuples a..b (0 <= a < b <= length).

    Proper slices satisfy the chain clauses of their parent window but not
    necessarily the final-node or length clauses of a standalone window, so
    they are data for pointwise inclusion rather than check_window.
    """
    if win.is_empty:
        raise WindowShapeError("cannot slice the empty window")
    if not (0 <= a < b <= win.length):
        raise IndexError(f"bad partial-window indices ({a}, {b}) for length {win.length}")
    s = win.density - 1
    return make_window(win.nodes[a * s : b * s + 1], win.subs[a * s : b * s], win.density)


def pointwise_included(s1: Window, s2: Window, k: int) -> bool:
    """Pointwise k-inclusion on equal-shape windows / partial windows."""
    if s1.is_empty != s2.is_empty or (
        not s1.is_empty and (len(s1.nodes) != len(s2.nodes) or s1.density != s2.density)
    ):
        raise WindowShapeError("pointwise inclusion on mismatched window shapes")
    return _pointwise(s1, s2, k)


def _pointwise(s1: Window, s2: Window, k: int) -> bool:
    if s1.is_empty and s2.is_empty:
        return True
    if k <= 0 or s1.is_empty or s2.is_empty:
        return False
    if len(s1.nodes) != len(s2.nodes) or s1.density != s2.density:
        return False
    L = len(s1.nodes) - 1
    for t in range(L + 1):
        need = s1.nodes[t]
        if t < L:
            need = need.union(box_minus(s2.nodes[t + 1]))
        if not (is_ccs(s2.nodes[t]) and need.issubset(s2.nodes[t])):
            return False
    return all(_pointwise(s1.subs[t], s2.subs[t], k - 1) for t in range(L))


def _continuation_shape(w1: Window, w2: Window) -> None:
    if w1.is_empty or w2.is_empty:
        raise WindowShapeError("continuations are defined on composite windows")
    if w1.density != w2.density or len(w1.nodes) != len(w2.nodes):
        raise WindowShapeError("continuation on mismatched window shapes")


def _continuation_nodes_ok(w1: Window, w2: Window) -> bool:
    s = w1.density - 1
    L = len(w1.nodes) - 1
    for t in range(L - s + 1):
        need = w1.nodes[t + s].union(box_minus(w2.nodes[t + 1]))
        if not (is_ccs(w2.nodes[t]) and need.issubset(w2.nodes[t])):
            return False
    return True


def is_continuation(w1: Window, w2: Window, u: FormulaSet, k: int) -> bool:
    """True iff the end of w1 is pointwise k-included in the beginning of
    w2, with a shift of density-1 node positions."""
    _continuation_shape(w1, w2)
    if not _continuation_nodes_ok(w1, w2):
        return False
    s = w1.density - 1
    L = len(w1.nodes) - 1
    return all(_pointwise(w1.subs[t + s], w2.subs[t], k - 1) for t in range(L - s))


def glue(w1: Window, w2: Window, u: FormulaSet, k: int) -> Window:
    """The length+1 window obtained from a continuation pair: w1's first
    node tuple prepended to w2."""
    if not is_continuation(w1, w2, u, k):
        raise ContinuationError("glue requires is_continuation(w1, w2, u, k)")
    s = w1.density - 1
    return make_window(w1.nodes[:s] + w2.nodes, w1.subs[:s] + w2.subs, w1.density)


def degree_gap(w1: Window, w2: Window, u: FormulaSet, i: int) -> int:
    """depth(w2-node at tuple i-1 minus w1-node at tuple i); bounded by
    d(u) + i - (length+1) (truncated) on continuation pairs."""
    _continuation_shape(w1, w2)
    if not _continuation_nodes_ok(w1, w2):
        raise ContinuationError("degree_gap requires a continuation pair")
    if not (1 <= i <= w1.length):
        raise IndexError(f"degree_gap index {i} out of range 1..{w1.length}")
    s = w1.density - 1
    t = (i - 1) * s
    return w2.nodes[t].difference(w1.nodes[t + s]).depth


# ---------------------------------------------------------------------------
# Enumeration
#
# Every chain node is generated as a minimal saturation of the union of all
# box obligations flowing into it.  For a node w_t those come from three
# directions: the anchor u (at boundary positions), the chain predecessor
# w_{t+1}, and the node-1 members of the nested subwindows sitting on each
# edge that targets w_t (the subwindow on (w_{t+1}, w_t), its own first
# subwindow, and so on down the nesting spine; they all share w_t as their
# first node).  The spine obligations depend only on nodes generated
# earlier, so generation runs back to front, producing for each edge a
# "hollow" subwindow (everything but its first node) whose hole is plugged
# with the target node once that node is saturated.  In particular the
# first node of a produced window may properly extend the requested v0: the
# saturation closes v0 under the obligations of the chosen tail, which is
# exactly the closure a model-guided choice would carry.


_FORCED: dict[int, "FormulaSet | None"] = {}


def _forced_closure(s: FormulaSet) -> Optional[FormulaSet]:
    """The deterministic part of saturation: closure of s under the
    conjunction and double-negation rules only.  Every saturation of any
    superset of s contains this closure; None signals a forced clash, i.e.
    no saturation of s exists."""
    hit = _FORCED.get(s.idx, 0)
    if hit != 0:
        return hit
    members: dict[int, "Formula"] = {}
    stack = list(s.items)
    out: Optional[FormulaSet] = s
    while stack:
        f = stack.pop()
        if f.idx in members:
            continue
        if f.kind == "bot" or neg(f).idx in members or (f.kind == "neg" and f.left.idx in members):
            out = None
            break
        members[f.idx] = f
        if f.kind == "conj":
            stack.append(f.left)
            stack.append(f.right)
        elif f.kind == "neg" and f.left.kind == "neg":
            stack.append(f.left.left)
    if out is not None:
        out = fset(members.values())
    _FORCED[s.idx] = out
    return out


def _viable_chain(x_t: FormulaSet, t: int, seed_at, hole_seed) -> bool:
    """Lookahead prune: propagate the forced closure of the chain seeds from
    position t down to the (possibly pinned) first node; a forced clash
    anywhere means no completion of this branch exists."""
    lb = x_t
    for tt in range(t - 1, 0, -1):
        lb = _forced_closure(seed_at(tt, lb))
        if lb is None:
            return False
    if hole_seed is not None:
        return _forced_closure(hole_seed(lb)) is not None
    return True


class _Hollow:
    """A window missing its first node: tail nodes x_L..x_1, complete
    subwindows for the edges among them, a recursively hollow first-edge
    subwindow, and the accumulated obligations on the future first node."""

    __slots__ = ("tail", "tail_subs", "spine", "obligations", "density")

    def __init__(self, tail, tail_subs, spine, obligations, density):
        self.tail = tail              # (x_1, ..., x_L)
        self.tail_subs = tail_subs    # subwindows for edges (x_{t+1}, x_t), t >= 1
        self.spine = spine            # _Hollow | None for the edge (x_1, hole)
        self.obligations = obligations
        self.density = density

    def plug(self, w0: FormulaSet) -> Window:
        first = self.spine.plug(w0) if self.spine is not None else empty_window(self.density)
        return make_window((w0,) + self.tail, (first,) + self.tail_subs, self.density)


def _hollow_stream(
    u: FormulaSet,
    k: int,
    density: int,
    lower: Optional[Window],
    hole_base: Optional[FormulaSet] = None,
) -> Iterator[Optional[_Hollow]]:
    """Hollow (k, depth(u), d)-windows anchored at u; None stands for the
    empty window (budget 0).  With `lower`, only hollows whose plugged
    window will pointwise-include it are produced.  `hole_base` is the part
    of the future first node already pinned by the caller; it is used for
    lookahead pruning only."""
    if k == 0:
        if lower is None or lower.is_empty:
            yield None
        return
    if k > u.depth or (lower is not None and lower.is_empty):
        return
    s = density - 1
    L = u.depth * s
    if lower is not None and (len(lower.nodes) != L + 1 or lower.density != density):
        return
    bm_u = box_minus(u)
    if hole_base is not None and _forced_closure(hole_base) is None:
        return

    def seed_at(t: int, below: FormulaSet) -> FormulaSet:
        seed = bm_u if t % s == 0 else EMPTY_SET
        seed = seed.union(box_minus(below))
        if lower is not None:
            seed = seed.union(lower.nodes[t])
        return seed

    def hole_seed(below: FormulaSet) -> FormulaSet:
        seed = hole_base.union(box_minus(below))
        if lower is not None:
            seed = seed.union(lower.nodes[0])
        return seed

    hole_fn = None if hole_base is None else hole_seed

    def gen(t: int, tail: tuple[FormulaSet, ...], tail_subs: tuple[Window, ...]) -> Iterator[_Hollow]:
        # tail holds x_{t+1}..x_L; extend with x_t (t >= 1) or close (t == 0)
        x_next = tail[0]
        sub_lower = lower.subs[t] if lower is not None else None
        sub_k = min(k - 1, x_next.depth)
        if t == 0:
            base0 = box_minus(x_next) if hole_base is None else hole_base.union(box_minus(x_next))
            if lower is not None:
                base0 = base0.union(lower.nodes[0])
            for spine in _hollow_stream(x_next, sub_k, density, sub_lower, base0):
                obligations = box_minus(x_next)
                if spine is not None:
                    obligations = obligations.union(spine.obligations)
                if lower is not None:
                    obligations = obligations.union(lower.nodes[0])
                yield _Hollow(tail, tail_subs, spine, obligations, density)
            return
        for sub in _hollow_stream(x_next, sub_k, density, sub_lower, seed_at(t, x_next)):
            seed = seed_at(t, x_next)
            if sub is not None:
                seed = seed.union(sub.obligations)
            for x_t in enumerate_ccs(seed):
                if not _viable_chain(x_t, t, seed_at, hole_fn):
                    continue
                sub_win = sub.plug(x_t) if sub is not None else empty_window(density)
                yield from gen(t - 1, (x_t,) + tail, (sub_win,) + tail_subs)

    top_seed = bm_u if lower is None else bm_u.union(lower.nodes[L])
    for x_l in enumerate_ccs(top_seed):
        if not _viable_chain(x_l, L, seed_at, hole_fn):
            continue
        yield from gen(L - 1, (x_l,), ())


def enumerate_windows(
    u: FormulaSet, v0: FormulaSet, k: int, density: int = 2
) -> Iterator[Window]:
    """All (k, depth(u), d)-windows anchored at u whose first node is a
    minimal saturation extending v0 (the extension carries the box
    obligations of the chosen tail), in canonical order, generated back to
    front.  Empty stream iff none exists."""
    if k == 0:
        yield empty_window(density)
        return
    if not is_ccs(v0):
        return
    bm_u = box_minus(u)
    for hollow in _hollow_stream(u, k, density, lower=None, hole_base=v0.union(bm_u)):
        seed = v0.union(bm_u).union(hollow.obligations)
        for w0 in enumerate_ccs(seed):
            yield hollow.plug(w0)


def enumerate_continuations(win: Window, u: FormulaSet, k: int) -> Iterator[Window]:
    """All k-continuations of `win` (a valid (k, depth(u), d)-window for u),
    canonical order; empty iff none."""
    if win.is_empty or k == 0:
        return
    density = win.density
    s = density - 1
    L = len(win.nodes) - 1
    bm_u = box_minus(u)
    hole_base = bm_u.union(win.nodes[s])

    def seed_at(t: int, below: FormulaSet) -> FormulaSet:
        seed = bm_u if t % s == 0 else EMPTY_SET
        seed = seed.union(box_minus(below))
        if t <= L - s:
            seed = seed.union(win.nodes[t + s])
        return seed

    def hole_seed(below: FormulaSet) -> FormulaSet:
        return hole_base.union(box_minus(below))

    def gen(t: int, tail: tuple[FormulaSet, ...], tail_subs: tuple[Window, ...]) -> Iterator[Window]:
        x_next = tail[0]
        sub_lower = win.subs[t + s] if t < L - s else None
        sub_k = min(k - 1, x_next.depth)
        if t == 0:
            base0 = hole_base.union(box_minus(x_next))
            for spine in _hollow_stream(x_next, sub_k, density, sub_lower, base0):
                seed = base0
                if spine is not None:
                    seed = seed.union(spine.obligations)
                for w0 in enumerate_ccs(seed):
                    first = spine.plug(w0) if spine is not None else empty_window(density)
                    yield make_window((w0,) + tail, (first,) + tail_subs, density)
            return
        for sub in _hollow_stream(x_next, sub_k, density, sub_lower, seed_at(t, x_next)):
            seed = seed_at(t, x_next)
            if sub is not None:
                seed = seed.union(sub.obligations)
            for x_t in enumerate_ccs(seed):
                if not _viable_chain(x_t, t, seed_at, hole_seed):
                    continue
                sub_win = sub.plug(x_t) if sub is not None else empty_window(density)
                yield from gen(t - 1, (x_t,) + tail, (sub_win,) + tail_subs)

    for x_l in enumerate_ccs(bm_u):
        if not _viable_chain(x_l, L, seed_at, hole_seed):
            continue
        yield from gen(L - 1, (x_l,), ())


# ---------------------------------------------------------------------------
# Counting bounds


def member_count_bound(depth_u: int, k: int, density: int = 2) -> int:
    """The s(k) recurrence bounding how many CCS a window can contain,
    evaluated at density*depth(u): s(0) = 1, s(k) = D + D*s(k-1)."""
    d = density * depth_u
    acc = 1
    for _ in range(k):
        acc = d + d * acc
    return acc


def chi_bound(u: FormulaSet, k: int, density: int = 2) -> int:
    """Chain length that forces a window repetition: an upper bound on the
    number of distinct (k, depth(u), d)-windows, plus density*depth(u).
    Reporting only; the solver accepts on repetition instead of counting."""
    count = member_count_bound(u.depth, k, density)
    return 2 ** (C_SF * density * u.length * count) + density * u.depth


# ---------------------------------------------------------------------------
# JSON form (nodes as arrays of canonical formula strings)


def window_to_json(win: Window) -> dict:
    if win.is_empty:
        return {"empty": True}
    return {
        "nodes": [[f.text for f in v] for v in win.nodes],
        "subwindows": [window_to_json(sub) for sub in win.subs],
    }


def window_from_json(data: dict, density: int) -> Window:
    if data.get("empty"):
        return empty_window(density)
    nodes = tuple(fset(parse(text) for text in v) for v in data["nodes"])
    subs = tuple(window_from_json(sub, density) for sub in data["subwindows"])
    return make_window(nodes, subs, density)
