"""Certificate format, schema validation, and mutation rejection."""

import copy
import json
import random

import jsonschema
import pytest

from densesat.cli import validate_schema
from densesat.formula import parse
from densesat.solver import (
    SATISFIABLE,
    DenseSolver,
    SolverConfig,
    check_certificate,
    check_certificate_detail,
    sat_formula,
)
from conftest import random_formula

SAMPLES = [
    ("<>p", 2),
    ("<>p & []q", 2),
    ("<><>p", 2),
    ("<>(p & <>~q)", 2),
    ("[][]p & <>p", 2),
    ("<><>p", 3),
    ("<>p & <>~p", 3),
    ("~([](p & q)) & <>q", 2),
]


def make_cert(text: str, density: int) -> dict:
    r = sat_formula(text, density, emit_certificate=True)
    assert r.status == SATISFIABLE
    return r.certificate


@pytest.fixture(scope="module")
def sample_certs():
    return [(make_cert(t, n), n) for t, n in SAMPLES]


def test_fresh_certificates_pass_schema_and_checker(sample_certs):
    for cert, density in sample_certs:
        validate_schema(cert, "certificate.schema.json")
        ok, why = check_certificate_detail(cert, density)
        assert ok, why
        # density defaults to the embedded one
        assert check_certificate(cert)


def test_certificates_are_json_stable(sample_certs):
    for cert, _ in sample_certs:
        assert json.loads(json.dumps(cert)) == cert


def _window_nodes(obj, path=()):
    """Yield (path, node-list) for every window node set in a certificate."""
    if isinstance(obj, dict):
        if "nodes" in obj and "subwindows" in obj:
            for i, node in enumerate(obj["nodes"]):
                yield path + ("nodes", i), node
        for key, val in obj.items():
            yield from _window_nodes(val, path + (key,))
    elif isinstance(obj, list):
        for i, val in enumerate(obj):
            yield from _window_nodes(val, path + (i,))


def _chains(obj):
    if isinstance(obj, dict):
        if "windows" in obj:
            yield obj
        for val in obj.values():
            yield from _chains(val)
    elif isinstance(obj, list):
        for val in obj:
            yield from _chains(val)


def _get(doc, path):
    for step in path:
        doc = doc[step]
    return doc


def mutations(cert: dict, rng: random.Random, want: int):
    """`want` single-field corruptions of `cert`, each provably invalid:
    a clash or bot injected into a node set, a dropped successor
    obligation, broken repetition indices, a truncated chain, a foreign
    top-level formula, wrong density, or a dropped diamond entry."""
    sites = []
    for path, node in _window_nodes(cert):
        sites.append(("bot", path))
        if node:
            sites.append(("clash", path))
    for chain in _chains(cert):
        if "repetition" in chain:
            h, j = chain["repetition"]
            if j - h >= 2:
                sites.append(("rep_shift", chain))
            sites.append(("rep_oob", chain))
            sites.append(("truncate", chain))
    sites.append(("formula", None))
    sites.append(("density", None))
    sites.append(("version", None))
    root = cert["root"]
    for i, entry in enumerate(root["diamonds"]):
        sites.append(("drop_diamond", i))
        if entry["v0"]:
            sites.append(("strip_v0", i))
    out = []
    while len(out) < want:
        kind, where = sites[rng.randrange(len(sites))]
        mutated = copy.deepcopy(cert)
        if kind == "bot":
            _get(mutated, where).append("bot")
        elif kind == "clash":
            node = _get(mutated, where)
            fresh = [t for t in node if f"~({t})" not in node]
            if not fresh:
                continue
            node.append(f"~({rng.choice(fresh)})")
        elif kind in ("rep_shift", "rep_oob", "truncate"):
            applied = False
            for chain in _chains(mutated):
                if "repetition" not in chain:
                    continue
                h, j = chain["repetition"]
                if kind == "rep_shift":
                    # spliced chains may repeat windows outside (h, j);
                    # only shift onto a genuinely different window
                    if j - h >= 2 and chain["windows"][h + 1] != chain["windows"][j]:
                        chain["repetition"] = [h + 1, j]
                        applied = True
                elif kind == "rep_oob":
                    chain["repetition"] = [h, j + 1]
                    applied = True
                else:
                    chain["windows"] = chain["windows"][:-1]
                    applied = True
                break
            if not applied:
                continue
        elif kind == "formula":
            mutated["formula"] = f"({cert['formula']})&({cert['formula']})"
        elif kind == "density":
            mutated["density"] = cert["density"] + 1
        elif kind == "version":
            mutated["version"] = 99
        elif kind == "drop_diamond":
            del mutated["root"]["diamonds"][where]
        elif kind == "strip_v0":
            # dropping the diamond witness obligation: remove ~phi from v0
            entry = mutated["root"]["diamonds"][where]
            d = parse(entry["diamond"])
            witness = f"~({d.left.left.text})"
            if witness not in entry["v0"]:
                continue
            entry["v0"].remove(witness)
        out.append(mutated)
    return out


def _rejected(mutated: dict, density: int) -> bool:
    try:
        validate_schema(mutated, "certificate.schema.json")
    except jsonschema.ValidationError:
        return True
    return not check_certificate(mutated, density)


def test_targeted_mutations_rejected(sample_certs):
    rng = random.Random(424242)
    for cert, density in sample_certs:
        for mutated in mutations(cert, rng, 12):
            assert _rejected(mutated, density)


def test_repetition_pointing_at_unequal_windows_rejected():
    cert = make_cert("<><>p", 2)
    chain = cert["root"]["diamonds"][0]["chain"]
    assert chain["repetition"] == [1, 2]
    mutated = copy.deepcopy(cert)
    mutated["root"]["diamonds"][0]["chain"]["repetition"] = [0, 2]
    ok, why = check_certificate_detail(mutated, 2)
    assert not ok
    assert "repetition" in why or "window" in why


def test_schema_rejects_malformed_documents():
    with pytest.raises(jsonschema.ValidationError):
        validate_schema({"format": "densesat-certificate"}, "certificate.schema.json")
    with pytest.raises(jsonschema.ValidationError):
        validate_schema(
            {
                "format": "densesat-certificate",
                "version": 1,
                "density": 2,
                "formula": "p",
                "root": {"ccs": ["p"], "diamonds": [], "extra": 1},
            },
            "certificate.schema.json",
        )


def test_checker_handles_garbage_gracefully():
    assert not check_certificate({"format": "densesat-certificate"}, 2)
    assert not check_certificate({}, 2)
    ok, why = check_certificate_detail({"format": "wrong"}, 2)
    assert not ok and "format" in why


def test_random_sat_certificates_roundtrip(rng):
    s2 = DenseSolver(SolverConfig(density=2, emit_certificate=True))
    n_checked = 0
    for _ in range(120):
        f = random_formula(rng, 2, rng.randint(1, 8))
        r = s2.sat_formula(f)
        if r.status == SATISFIABLE:
            blob = json.dumps(r.certificate, sort_keys=True)
            ok, why = check_certificate_detail(json.loads(blob), 2)
            assert ok, (f.text, why)
            n_checked += 1
    assert n_checked > 40
