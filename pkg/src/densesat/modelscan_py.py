"""Pure (numpy) model-scan kernel: exhaustive search for n-dense Kripke models.

A relation over w worlds is a w*w bit code (bit i*w+j set iff i -> j), a
valuation over k atoms is a k*w bit code (atom a true at world i iff bit
a*w+i set).  The sweep evaluates a formula DAG over the full
(relation, valuation) grid as w-bit truth masks and reports, per root
formula, the first satisfying (relation, valuation, world) triple in
canonical order: relation code ascending, valuation code ascending, world
index ascending.

The compiled twin in ``_modelscan`` implements the same contract; agreement
between the two is covered by tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .formula import ATOM, BOT, CONJ, NEG, Formula

OP_BOT, OP_ATOM, OP_NEG, OP_CONJ, OP_BOX = 0, 1, 2, 3, 4

_DENSE_CODES: dict[tuple[int, int], np.ndarray] = {}
_SCAN_CODES: dict[tuple[int, int], np.ndarray] = {}


def dense_relation_codes(w: int, n: int) -> np.ndarray:
    """All n-dense relation codes on w worlds (R subset R^n), ascending."""
    key = (w, n)
    cached = _DENSE_CODES.get(key)
    if cached is not None:
        return cached
    codes = np.arange(1 << (w * w), dtype=np.int64)
    full = (1 << w) - 1
    rows = [(codes >> (i * w)) & full for i in range(w)]
    rn = rows
    for _ in range(n - 1):
        rn = _compose(rows, rn, w)
    ok = np.ones(len(codes), dtype=bool)
    for i in range(w):
        ok &= (rows[i] & ~rn[i]) == 0
    out = codes[ok].astype(np.uint32)
    _DENSE_CODES[key] = out
    return out


def _compose(r1: list[np.ndarray], r2: list[np.ndarray], w: int) -> list[np.ndarray]:
    # row i of r1 o r2: union of r2 rows reachable from i under r1
    out = []
    for i in range(w):
        acc = np.zeros_like(r1[i])
        for j in range(w):
            acc |= np.where(((r1[i] >> j) & 1) == 1, r2[j], 0)
        out.append(acc)
    return out


def scan_relation_codes(w: int, n: int) -> np.ndarray:
    """Dense codes to sweep: orbit-minimal representatives for w <= 3 (cheap
    isomorphism pruning), the raw dense list above that."""
    key = (w, n)
    cached = _SCAN_CODES.get(key)
    if cached is not None:
        return cached
    codes = dense_relation_codes(w, n)
    if w <= 3:
        keep = np.ones(len(codes), dtype=bool)
        for perm in permutations(range(w)):
            if perm == tuple(range(w)):
                continue
            permuted = np.zeros(len(codes), dtype=np.uint32)
            for i in range(w):
                for j in range(w):
                    bit = (codes >> np.uint32(i * w + j)) & np.uint32(1)
                    permuted |= bit << np.uint32(perm[i] * w + perm[j])
            keep &= codes <= permuted
        codes = codes[keep]
    _SCAN_CODES[key] = codes
    return codes


@dataclass
class Program:
    """A formula DAG flattened to a topologically ordered instruction list."""

    ops: np.ndarray      # int8, one of OP_*
    arg1: np.ndarray     # int32: child slot / atom index
    arg2: np.ndarray     # int32: second child slot for OP_CONJ
    roots: list[int]     # slot of each requested root formula
    atoms: tuple[str, ...]


def compile_program(formulas: list[Formula], atoms: tuple[str, ...]) -> Program:
    atom_index = {a: i for i, a in enumerate(atoms)}
    reachable: dict[int, Formula] = {}
    stack = list(formulas)
    while stack:
        f = stack.pop()
        if f.idx in reachable:
            continue
        reachable[f.idx] = f
        if f.left is not None:
            stack.append(f.left)
        if f.right is not None:
            stack.append(f.right)
    # interning indices are topological (children precede parents)
    nodes = sorted(reachable.values(), key=lambda f: f.idx)
    slot = {f.idx: i for i, f in enumerate(nodes)}
    ops = np.zeros(len(nodes), dtype=np.int8)
    arg1 = np.zeros(len(nodes), dtype=np.int32)
    arg2 = np.zeros(len(nodes), dtype=np.int32)
    for i, f in enumerate(nodes):
        if f.kind == BOT:
            ops[i] = OP_BOT
        elif f.kind == ATOM:
            ops[i] = OP_ATOM
            arg1[i] = atom_index[f.name]
        elif f.kind == NEG:
            ops[i] = OP_NEG
            arg1[i] = slot[f.left.idx]
        elif f.kind == CONJ:
            ops[i] = OP_CONJ
            arg1[i] = slot[f.left.idx]
            arg2[i] = slot[f.right.idx]
        else:
            ops[i] = OP_BOX
            arg1[i] = slot[f.left.idx]
    return Program(ops, arg1, arg2, [slot[f.idx] for f in formulas], atoms)


def valuation_masks(w: int, n_atoms: int) -> np.ndarray:
    """masks[v, a] = w-bit truth mask of atom a under valuation code v."""
    v = np.arange(1 << (w * n_atoms), dtype=np.uint32)
    full = np.uint32((1 << w) - 1)
    out = np.empty((len(v), max(n_atoms, 1)), dtype=np.uint16)
    for a in range(max(n_atoms, 1)):
        out[:, a] = (v >> np.uint32(a * w)) & full
    return out


def _plan(program: Program, pending: list[int]) -> tuple[list[int], dict[int, int], dict[int, list[int]]]:
    # slots to evaluate, last use of each slot, pending roots per slot
    needed_by: dict[int, list[int]] = {}
    for ri in pending:
        needed_by.setdefault(program.roots[ri], []).append(ri)
    needed = set(needed_by)
    for i in range(len(program.ops) - 1, -1, -1):
        if i in needed and program.ops[i] != OP_BOT and program.ops[i] != OP_ATOM:
            needed.add(int(program.arg1[i]))
            if program.ops[i] == OP_CONJ:
                needed.add(int(program.arg2[i]))
    order = sorted(needed)
    last_use = {i: i for i in order}
    for i in order:
        if program.ops[i] in (OP_NEG, OP_CONJ, OP_BOX):
            last_use[int(program.arg1[i])] = i
        if program.ops[i] == OP_CONJ:
            last_use[int(program.arg2[i])] = i
    return order, last_use, needed_by


def sweep(
    program: Program,
    w: int,
    codes: np.ndarray,
    pending: list[int],
    chunk: int = 4096,
) -> dict[int, tuple[int, int, int]]:
    """Scan the grid for the roots listed in `pending` (indices into
    program.roots).  Returns {root_index: (relation_code, valuation_code,
    world)} holding the canonically first hit for every root satisfied
    somewhere in the grid.
    """
    full = np.uint16((1 << w) - 1)
    val_masks = valuation_masks(w, len(program.atoms))
    nvals = val_masks.shape[0]
    hits: dict[int, tuple[int, int, int]] = {}
    todo = set(pending)
    ops, arg1, arg2 = program.ops, program.arg1, program.arg2

    for start in range(0, len(codes), chunk):
        if not todo:
            break
        order, last_use, needed_by = _plan(program, sorted(todo))
        ck = codes[start : start + chunk].astype(np.uint32)
        rows = [((ck >> np.uint32(i * w)) & full).astype(np.uint16) for i in range(w)]
        values: dict[int, np.ndarray] = {}
        for i in order:
            op = ops[i]
            if op == OP_BOT:
                val = np.zeros((len(ck), nvals), dtype=np.uint16)
            elif op == OP_ATOM:
                val = np.broadcast_to(val_masks[:, arg1[i]], (len(ck), nvals))
            elif op == OP_NEG:
                val = values[arg1[i]] ^ full
            elif op == OP_CONJ:
                val = values[arg1[i]] & values[arg2[i]]
            else:  # OP_BOX: true at world x iff every successor satisfies child
                notc = values[arg1[i]] ^ full
                val = np.zeros_like(notc)
                for wi in range(w):
                    bad = (rows[wi][:, None] & notc) != 0
                    val |= (~bad).astype(np.uint16) << np.uint16(wi)
            values[i] = val
            if i in needed_by:
                nz = np.flatnonzero(val)
                if len(nz):
                    k = int(nz[0])
                    hit = (int(ck[k // nvals]), k % nvals, _lowest_bit(int(val.flat[k])))
                    for ri in needed_by[i]:
                        if ri in todo:
                            hits[ri] = hit
                            todo.discard(ri)
            for j in [j for j in values if last_use[j] <= i and j != i]:
                del values[j]
        del values
    return hits


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1
