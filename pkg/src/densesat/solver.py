"""The decision procedure for n-dense satisfiability.

Nondeterministic choice in the calculus (pick a CCS, pick a window, pick a
continuation) is realized as ordered backtracking over the deterministic
streams of `ccs` and `windows`.  A continuation chain is accepted as soon
as it revisits a window: finitely many windows exist per anchor, so every
chain either fails or repeats, and a repeat pumps to an arbitrarily long
chain.  The explicit chain-length counter of the original formulation is
computed only for reporting (`windows.chi_bound`).

A satisfiable verdict can carry a certificate: the chosen root CCS and,
per diamond member, the chosen successor CCS plus the accepted window
chain with its repetition indices and the recursively certified
subproblems.  `check_certificate` revalidates every clause from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .ccs import box_minus, diamonds, enumerate_ccs, is_ccs
from .formula import Formula, FormulaSet, fset, neg, parse
from .windows import (
    Window,
    WindowParams,
    check_window,
    chi_bound,
    enumerate_continuations,
    enumerate_windows,
    is_continuation,
    member_count_bound,
    members,
    window_from_json,
    window_to_json,
)

CERT_FORMAT = "densesat-certificate"
CERT_VERSION = 1

SATISFIABLE = "satisfiable"
UNSATISFIABLE = "unsatisfiable"


class ResourceLimitExceeded(RuntimeError):
    """A configured ceiling was hit; no verdict is implied."""


@dataclass
class SolverConfig:
    density: int = 2
    emit_certificate: bool = False
    max_branches: int = 50_000_000
    max_chain: int = 100_000
    exhaustive_ccs: bool = False  # differential-debugging fallback

    def __post_init__(self):
        if self.density < 2:
            raise ValueError("density must be >= 2")
        if self.max_branches <= 0 or self.max_chain <= 0:
            raise ValueError("resource ceilings must be positive")


@dataclass
class SolveStats:
    branches: int = 0
    windows_generated: int = 0
    max_chain_length: int = 0
    max_recursion_depth: int = 0
    peak_live_windows: int = 0
    chain_bound_ok: bool = True
    member_bound_ok: bool = True

    def as_dict(self) -> dict:
        return {
            "branches": self.branches,
            "windows_generated": self.windows_generated,
            "max_chain_length": self.max_chain_length,
            "max_recursion_depth": self.max_recursion_depth,
            "peak_live_windows": self.peak_live_windows,
            "chain_bound_ok": self.chain_bound_ok,
            "member_bound_ok": self.member_bound_ok,
        }


@dataclass
class SolveResult:
    status: str
    certificate: Optional[dict]
    stats: SolveStats


class DenseSolver:
    """One solver instance per density; memo caches are per instance and may
    be shared across queries (they only ever cache query-independent facts).
    """

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self.density = self.config.density
        self.stats = SolveStats()
        self._ccs_cache: dict[int, tuple[bool, Optional[dict]]] = {}
        self._satw_cache: dict[tuple[int, int, int], dict] = {}
        self._chi_cache: dict[tuple[int, int], int] = {}
        self._live = 0
        self._depth = 0

    # -- public API --------------------------------------------------------

    def sat_formula(self, f: Formula | str) -> SolveResult:
        if isinstance(f, str):
            f = parse(f)
        self.stats = SolveStats()
        for u in self._stream(enumerate_ccs(fset([f]), self.config.exhaustive_ccs)):
            ok, cert = self._sat_ccs(u)
            if ok:
                certificate = None
                if self.config.emit_certificate:
                    certificate = {
                        "format": CERT_FORMAT,
                        "version": CERT_VERSION,
                        "density": self.density,
                        "formula": f.text,
                        "root": self._ccs_cert_json(cert),
                    }
                return SolveResult(SATISFIABLE, certificate, self.stats)
        return SolveResult(UNSATISFIABLE, None, self.stats)

    def sat_ccs(self, u: FormulaSet) -> bool:
        if not is_ccs(u):
            raise ValueError("sat_ccs requires a CCS")
        return self._sat_ccs(u)[0]

    def satw(self, win: Window, u: FormulaSet, k: int) -> bool:
        """Window satisfiability with a fresh continuation chain: true on a
        base case (k = 0 or depth(u) <= 1) or when some continuation chain
        from `win` revisits a window with all side conditions satisfied."""
        return self._satw_entry(win, u, k) is not None

    # -- core recursion ----------------------------------------------------

    def _sat_ccs(self, u: FormulaSet) -> tuple[bool, Optional[dict]]:
        cached = self._ccs_cache.get(u.idx)
        if cached is not None:
            return cached
        self._depth += 1
        self.stats.max_recursion_depth = max(self.stats.max_recursion_depth, self._depth)
        entries = []
        ok = True
        for d in diamonds(u):
            seed = fset([neg(d.left.left)]).union(box_minus(u))
            entry = None
            k = u.depth
            for v0 in self._stream(enumerate_ccs(seed, self.config.exhaustive_ccs)):
                for w0 in self._windows(enumerate_windows(u, v0, k, self.density), u, k):
                    frag = self._satw_entry(w0, u, k)
                    if frag is not None:
                        # the window generator may have extended v0 with box
                        # obligations of the chosen tail; record the actual node
                        entry = {"diamond": d, "v0": w0.nodes[0], "chain": frag}
                        break
                if entry is not None:
                    break
            if entry is None:
                ok = False
                break
            entries.append(entry)
        self._depth -= 1
        res = (True, {"ccs": u, "diamonds": entries}) if ok else (False, None)
        self._ccs_cache[u.idx] = res
        return res

    def _satw_entry(self, win: Window, u: FormulaSet, k: int) -> Optional[dict]:
        if k == 0 or u.depth <= 1:
            return {"windows": [win], "base_case": "k=0" if k == 0 else "depth<=1"}
        self._depth += 1
        self.stats.max_recursion_depth = max(self.stats.max_recursion_depth, self._depth)
        chain: list[Window] = []
        index: dict[int, int] = {}
        steps: list[dict] = []
        h = self._chain_step(u, k, win, chain, index, steps)
        self._depth -= 1
        if h is None:
            return None
        self.stats.max_chain_length = max(self.stats.max_chain_length, len(chain))
        if len(chain) > self._chi(u, k):
            self.stats.chain_bound_ok = False
        self._live -= len(chain)
        j = len(chain) - 1
        frag = {"windows": list(chain), "repetition": (h, j), "steps": list(steps)}
        for i in range(h + 1):
            key = (chain[i].idx, u.idx, k)
            if key not in self._satw_cache:
                self._satw_cache[key] = {
                    "windows": chain[i:],
                    "repetition": (h - i, j - i),
                    "steps": steps[i:],
                }
        return frag

    def _chain_step(
        self,
        u: FormulaSet,
        k: int,
        win: Window,
        chain: list[Window],
        index: dict[int, int],
        steps: list[dict],
    ) -> Optional[int]:
        """Extend the current chain with `win`; on acceptance the chain ends
        with a repeated window and the repetition target index is returned."""
        if len(chain) >= self.config.max_chain:
            raise ResourceLimitExceeded(f"continuation chain exceeded {self.config.max_chain}")
        pos = index.get(win.idx)
        if pos is not None:
            chain.append(win)
            self._note_live(1)
            return pos
        cached = self._satw_cache.get((win.idx, u.idx, k))
        if cached is not None:
            base = len(chain)
            chain.extend(cached["windows"])
            steps.extend(cached["steps"])
            self._note_live(len(cached["windows"]))
            return base + cached["repetition"][0]

        ok0, cert0 = self._sat_ccs(win.nodes[0])
        if not ok0:
            return None
        subcerts = []
        for j in range(self.density - 1):
            anchor = win.nodes[j + 1]
            frag = self._satw_entry(win.subs[j], anchor, min(k - 1, anchor.depth))
            if frag is None:
                return None
            subcerts.append(frag)

        chain.append(win)
        index[win.idx] = len(chain) - 1
        steps.append({"v0_sat": cert0, "subs": subcerts})
        self._note_live(1)
        for w2 in self._windows(enumerate_continuations(win, u, k), u, k):
            h = self._chain_step(u, k, w2, chain, index, steps)
            if h is not None:
                return h
        chain.pop()
        del index[win.idx]
        steps.pop()
        self._live -= 1
        return None

    # -- bookkeeping -------------------------------------------------------

    def _note_live(self, n: int) -> None:
        self._live += n
        self.stats.peak_live_windows = max(self.stats.peak_live_windows, self._live)

    def _chi(self, u: FormulaSet, k: int) -> int:
        key = (u.idx, k)
        got = self._chi_cache.get(key)
        if got is None:
            got = chi_bound(u, k, self.density)
            self._chi_cache[key] = got
        return got

    def _stream(self, it: Iterator) -> Iterator:
        for x in it:
            self.stats.branches += 1
            if self.stats.branches > self.config.max_branches:
                raise ResourceLimitExceeded(f"branch ceiling {self.config.max_branches} exceeded")
            yield x

    def _windows(self, it: Iterator[Window], u: FormulaSet, k: int) -> Iterator[Window]:
        bound = member_count_bound(u.depth, k, self.density)
        for w in self._stream(it):
            self.stats.windows_generated += 1
            if not w.is_empty and len(members(w)) > bound:
                self.stats.member_bound_ok = False
            yield w

    # -- certificate JSON --------------------------------------------------

    def _ccs_cert_json(self, cert: dict) -> dict:
        return {
            "ccs": [f.text for f in cert["ccs"]],
            "diamonds": [
                {
                    "diamond": e["diamond"].text,
                    "v0": [f.text for f in e["v0"]],
                    "chain": self._chain_cert_json(e["chain"]),
                }
                for e in cert["diamonds"]
            ],
        }

    def _chain_cert_json(self, frag: dict) -> dict:
        out: dict = {"windows": [window_to_json(w) for w in frag["windows"]]}
        if "base_case" in frag:
            out["base_case"] = frag["base_case"]
            return out
        out["repetition"] = list(frag["repetition"])
        out["steps"] = [
            {
                "v0_sat": self._ccs_cert_json(step["v0_sat"]),
                "subs": [self._chain_cert_json(s) for s in step["subs"]],
            }
            for step in frag["steps"]
        ]
        return out


# ---------------------------------------------------------------------------
# Module-level conveniences


def sat_formula(
    f: Formula | str,
    density: int = 2,
    emit_certificate: bool = False,
    config: Optional[SolverConfig] = None,
) -> SolveResult:
    if config is None:
        config = SolverConfig(density=density, emit_certificate=emit_certificate)
    return DenseSolver(config).sat_formula(f)


# ---------------------------------------------------------------------------
# Certificate checking (independent of the solver: recomputes every clause)


def check_certificate(cert: dict, density: Optional[int] = None) -> bool:
    ok, _ = check_certificate_detail(cert, density)
    return ok


def check_certificate_detail(cert: dict, density: Optional[int] = None) -> tuple[bool, str]:
    """Validate a certificate; on failure the second component names the
    first failing clause."""
    try:
        return _check_cert(cert, density)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        return False, f"malformed certificate: {exc}"


def _check_cert(cert: dict, density: Optional[int]) -> tuple[bool, str]:
    if cert.get("format") != CERT_FORMAT:
        return False, "format: not a densesat certificate"
    if cert.get("version") != CERT_VERSION:
        return False, f"version: expected {CERT_VERSION}"
    n = cert["density"]
    if not isinstance(n, int) or n < 2:
        return False, "density: must be an integer >= 2"
    if density is not None and n != density:
        return False, f"density: certificate is for density {n}, expected {density}"
    f = parse(cert["formula"])
    root = cert["root"]
    u = fset(parse(t) for t in root["ccs"])
    if f not in u:
        return False, "root: ccs does not contain the formula"
    return _check_ccs_cert(root, n, path="root")


def _check_ccs_cert(node: dict, density: int, path: str) -> tuple[bool, str]:
    u = fset(parse(t) for t in node["ccs"])
    if not is_ccs(u):
        return False, f"{path}: set is not a CCS"
    want = {d.text for d in diamonds(u)}
    got = [e["diamond"] for e in node["diamonds"]]
    if len(got) != len(set(got)) or set(got) != want:
        return False, f"{path}: diamond entries do not match the diamonds of the set"
    for e in node["diamonds"]:
        d = parse(e["diamond"])
        v0 = fset(parse(t) for t in e["v0"])
        seed = fset([neg(d.left.left)]).union(box_minus(u))
        if not is_ccs(v0):
            return False, f"{path}/{d.text}: v0 is not a CCS"
        if not seed.issubset(v0):
            return False, f"{path}/{d.text}: v0 misses a successor obligation"
        ok, why = _check_chain_cert(e["chain"], u, u.depth, v0, density, f"{path}/{d.text}")
        if not ok:
            return False, why
    return True, ""


def _check_chain_cert(
    node: dict, u: FormulaSet, k: int, v0: FormulaSet, density: int, path: str
) -> tuple[bool, str]:
    wins = [window_from_json(w, density) for w in node["windows"]]
    if not wins:
        return False, f"{path}: empty window chain"
    params = WindowParams(k, max(u.depth, 1), density)
    if wins[0].is_empty:
        if k != 0:
            return False, f"{path}: empty window with positive nesting budget"
    elif wins[0].nodes[0] is not v0:
        return False, f"{path}: chain does not start at the chosen v0"
    for i, w in enumerate(wins):
        anchor_v0 = v0 if w.is_empty else w.nodes[0]
        if not check_window(w, u, anchor_v0, params):
            return False, f"{path}: window {i} fails check_window"
    if "base_case" in node:
        marker = node["base_case"]
        if marker == "k=0":
            if k != 0:
                return False, f"{path}: base case k=0 claimed with k={k}"
        elif marker == "depth<=1":
            if u.depth > 1:
                return False, f"{path}: base case depth<=1 claimed with depth {u.depth}"
        else:
            return False, f"{path}: unknown base case marker {marker!r}"
        if len(wins) != 1:
            return False, f"{path}: base case with a multi-window chain"
        return True, ""
    h, j = node["repetition"]
    if not (isinstance(h, int) and isinstance(j, int) and 0 <= h < j == len(wins) - 1):
        return False, f"{path}: bad repetition indices ({h}, {j})"
    if wins[h] is not wins[j]:
        return False, f"{path}: repetition indices point at unequal windows"
    for i in range(len(wins) - 1):
        try:
            if not is_continuation(wins[i], wins[i + 1], u, k):
                return False, f"{path}: window {i + 1} is not a continuation of window {i}"
        except ValueError:
            return False, f"{path}: window {i + 1} is not shape-compatible with window {i}"
    steps = node["steps"]
    if len(steps) != j:
        return False, f"{path}: expected {j} chain steps, found {len(steps)}"
    for i, step in enumerate(steps):
        w = wins[i]
        sub_u = fset(parse(t) for t in step["v0_sat"]["ccs"])
        if sub_u is not w.nodes[0]:
            return False, f"{path}: step {i} certifies the wrong node set"
        ok, why = _check_ccs_cert(step["v0_sat"], density, f"{path}/step{i}")
        if not ok:
            return False, why
        if len(step["subs"]) != density - 1:
            return False, f"{path}: step {i} must certify {density - 1} subwindows"
        for sj, sub in enumerate(step["subs"]):
            anchor = w.nodes[sj + 1]
            sub_wins = sub["windows"]
            first = window_from_json(sub_wins[0], density) if sub_wins else None
            if first is not w.subs[sj]:
                return False, f"{path}: step {i} subchain {sj} does not start at the subwindow"
            ok, why = _check_chain_cert(
                sub, anchor, min(k - 1, anchor.depth), w.nodes[sj], density, f"{path}/step{i}/sub{sj}"
            )
            if not ok:
                return False, why
    return True, ""
