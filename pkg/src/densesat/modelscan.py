"""Kernel selection for the brute-force model sweep.

``densesat._modelscan`` is a compiled (Cython) twin of the numpy kernel in
``modelscan_py``; whichever is available is picked at import time.  Set
DENSESAT_KERNEL=pure or DENSESAT_KERNEL=compiled to force a backend (the
benchmark and agreement tests do).
"""

from __future__ import annotations

import os

import numpy as np

from . import modelscan_py
from .formula import Formula, atoms_of

try:
    from . import _modelscan  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _modelscan = None
    HAVE_COMPILED = False


def backend_name() -> str:
    forced = os.environ.get("DENSESAT_KERNEL", "auto")
    if forced == "pure":
        return "pure"
    if forced == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("DENSESAT_KERNEL=compiled but densesat._modelscan is not built")
        return "compiled"
    return "compiled" if HAVE_COMPILED else "pure"


def _sweep(program: modelscan_py.Program, w: int, codes: np.ndarray, pending: list[int]):
    if backend_name() == "compiled":
        return _modelscan.sweep(
            program.ops,
            program.arg1,
            program.arg2,
            np.asarray(program.roots, dtype=np.int32),
            len(program.atoms),
            w,
            codes.astype(np.uint32),
            np.asarray(sorted(pending), dtype=np.int32),
        )
    return modelscan_py.sweep(program, w, codes, pending)


def batch_search(
    formulas: list[Formula],
    n: int,
    max_worlds: int,
    atoms: tuple[str, ...] | None = None,
) -> list[tuple[int, int, int, int] | None]:
    """For each formula, the first (worlds, relation_code, valuation_code,
    world) witnessing n-dense satisfiability within `max_worlds`, else None.

    With an explicit `atoms` tuple the valuation space is fixed; otherwise
    the union of the formulas' atoms is used (witness valuation codes are
    then relative to that union).
    """
    if atoms is None:
        seen: dict[str, None] = {}
        for f in formulas:
            for a in atoms_of(f):
                seen.setdefault(a)
        atoms = tuple(sorted(seen))
    program = modelscan_py.compile_program(formulas, atoms)
    out: list[tuple[int, int, int, int] | None] = [None] * len(formulas)
    pending = list(range(len(formulas)))
    for w in range(1, max_worlds + 1):
        if not pending:
            break
        codes = modelscan_py.scan_relation_codes(w, n)
        hits = _sweep(program, w, codes, pending)
        for ri, (rel, vcode, world) in hits.items():
            out[ri] = (w, rel, vcode, world)
        pending = [ri for ri in pending if out[ri] is None]
    return out
