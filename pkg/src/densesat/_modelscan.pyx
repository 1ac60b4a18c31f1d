# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the numpy model-scan kernel.

Same contract as ``modelscan_py.sweep``: evaluate a formula DAG over the
(relation, valuation) grid as w-bit truth masks and report, per pending
root, the canonically first satisfying (relation_code, valuation_code,
world) triple.  The evaluation is grid-vectorized per DAG node (one C pass
over a relations-chunk x valuations buffer per node) with buffer-pool
reuse driven by last-use analysis, mirroring the numpy path bit for bit.
"""

import numpy as np

OP_BOT = 0
OP_ATOM = 1
OP_NEG = 2
OP_CONJ = 3
OP_BOX = 4

CHUNK = 4096


def sweep(ops, arg1, arg2, roots, int n_atoms, int w, codes, pending):
    ops = np.ascontiguousarray(ops, dtype=np.int8)
    arg1 = np.ascontiguousarray(arg1, dtype=np.int32)
    arg2 = np.ascontiguousarray(arg2, dtype=np.int32)
    codes = np.ascontiguousarray(codes, dtype=np.uint32)
    roots = np.ascontiguousarray(roots, dtype=np.int32)

    cdef long n_codes = codes.shape[0]
    cdef long nvals = 1 << (w * n_atoms)
    cdef unsigned short full = <unsigned short>((1 << w) - 1)

    vm = np.zeros((nvals, max(n_atoms, 1)), dtype=np.uint16)
    for a in range(max(n_atoms, 1)):
        vm[:, a] = (np.arange(nvals, dtype=np.uint32) >> np.uint32(a * w)) & np.uint32(full)
    vm = np.ascontiguousarray(vm)

    hits = {}
    todo = sorted(int(x) for x in (pending.tolist() if hasattr(pending, "tolist") else pending))

    cdef long start = 0
    while start < n_codes and todo:
        plan = _plan(ops, arg1, arg2, roots, todo)
        order, slot, n_slots, check_at, check_ri = plan
        chunk_codes = codes[start : start + CHUNK]
        found = _eval_chunk(
            ops, arg1, arg2, chunk_codes, order, slot, n_slots,
            check_at, check_ri, vm, w, nvals, full,
        )
        for ri, hit in found.items():
            hits[ri] = hit
        if found:
            todo = [ri for ri in todo if ri not in hits]
        start += CHUNK
    return hits


def _plan(ops, arg1, arg2, roots, todo):
    # evaluation order over needed slots, buffer-slot assignment via
    # last-use analysis, and the root checks keyed by order position
    needed_by = {}
    for ri in todo:
        needed_by.setdefault(int(roots[ri]), []).append(ri)
    needed = set(needed_by)
    for i in range(len(ops) - 1, -1, -1):
        if i in needed and ops[i] in (OP_NEG, OP_CONJ, OP_BOX):
            needed.add(int(arg1[i]))
            if ops[i] == OP_CONJ:
                needed.add(int(arg2[i]))
    order = sorted(needed)
    pos = {node: t for t, node in enumerate(order)}
    last_use = {node: pos[node] for node in order}
    for node in order:
        if ops[node] in (OP_NEG, OP_CONJ, OP_BOX):
            last_use[int(arg1[node])] = pos[node]
        if ops[node] == OP_CONJ:
            last_use[int(arg2[node])] = pos[node]
    slot = np.full(len(ops), -1, dtype=np.int32)
    free: list[int] = []
    n_slots = 0
    by_release: dict[int, list[int]] = {}
    for t, node in enumerate(order):
        if free:
            slot[node] = free.pop()
        else:
            slot[node] = n_slots
            n_slots += 1
        by_release.setdefault(last_use[node], []).append(int(slot[node]))
        for s in by_release.pop(t, []):
            free.append(s)
    check_at, check_ri = [], []
    for t, node in enumerate(order):
        for ri in needed_by.get(node, []):
            check_at.append(t)
            check_ri.append(ri)
    return (
        np.asarray(order, dtype=np.int32),
        slot,
        max(n_slots, 1),
        np.asarray(check_at, dtype=np.int32),
        np.asarray(check_ri, dtype=np.int32),
    )


def _eval_chunk(
    ops_o, arg1_o, arg2_o, codes_o, order_o, slot_o, int n_slots,
    check_at_o, check_ri_o, vm_o, int w, long nvals, unsigned short full,
):
    cdef signed char[::1] ops = ops_o
    cdef int[::1] arg1 = arg1_o
    cdef int[::1] arg2 = arg2_o
    cdef unsigned int[::1] codes = codes_o
    cdef int[::1] order = order_o
    cdef int[::1] slot = slot_o
    cdef int[::1] check_at = check_at_o
    cdef int[::1] check_ri = check_ri_o
    cdef unsigned short[:, ::1] vm = vm_o

    cdef long n_rel = codes.shape[0]
    cdef long cells = n_rel * nvals
    buf_arr = np.empty((n_slots, cells), dtype=np.uint16)
    rows_arr = np.empty(n_rel * w, dtype=np.uint16)
    cdef unsigned short[:, ::1] buf = buf_arr
    cdef unsigned short[::1] rows = rows_arr

    cdef long c, v, i
    cdef int t, wi, node, ci = 0, nchecks = check_at.shape[0]
    cdef unsigned short m, ch
    cdef unsigned short *out
    cdef unsigned short *la
    cdef unsigned short *rb
    cdef dict found = {}

    for c in range(n_rel):
        for wi in range(w):
            rows[c * w + wi] = <unsigned short>((codes[c] >> (wi * w)) & full)

    for t in range(order.shape[0]):
        node = order[t]
        out = &buf[slot[node], 0]
        if ops[node] == OP_BOT:
            for i in range(cells):
                out[i] = 0
        elif ops[node] == OP_ATOM:
            for c in range(n_rel):
                for v in range(nvals):
                    out[c * nvals + v] = vm[v, arg1[node]]
        elif ops[node] == OP_NEG:
            la = &buf[slot[arg1[node]], 0]
            for i in range(cells):
                out[i] = la[i] ^ full
        elif ops[node] == OP_CONJ:
            la = &buf[slot[arg1[node]], 0]
            rb = &buf[slot[arg2[node]], 0]
            for i in range(cells):
                out[i] = la[i] & rb[i]
        else:  # OP_BOX
            la = &buf[slot[arg1[node]], 0]
            for c in range(n_rel):
                for v in range(nvals):
                    ch = la[c * nvals + v] ^ full
                    m = 0
                    for wi in range(w):
                        if (rows[c * w + wi] & ch) == 0:
                            m |= <unsigned short>(1 << wi)
                    out[c * nvals + v] = m
        if ci < nchecks and check_at[ci] == t:
            m = 0
            for i in range(cells):
                m |= out[i]
            while ci < nchecks and check_at[ci] == t:
                if m != 0:
                    for i in range(cells):
                        if out[i] != 0:
                            for wi in range(w):
                                if out[i] & (1 << wi):
                                    found[int(check_ri[ci])] = (
                                        int(codes[i // nvals]), int(i % nvals), wi,
                                    )
                                    break
                            break
                ci += 1
    return found
