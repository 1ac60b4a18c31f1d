"""Command-line front end: solve, oracle, check-cert, check-model, reduce,
corpus, bench.

Exit codes keep verdicts and failures apart: 10 satisfiable / 20
unsatisfiable (solve), 0 valid / 3 invalid (check-cert, check-model),
1 usage, parse or schema error, 2 resource-ceiling breach, 4 oracle
disagreement or bound violation (oracle, bench).
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field

from . import modelscan
from .corpus import CorpusSpec, build_corpus, corpus_dumps, corpus_to_json, load_corpus
from .formula import Formula, ParseError, parse
from .reduction import AtomOccursError, tau
from .semantics import (
    CLOSED,
    EXHAUSTED,
    SATURATED,
    KripkeModel,
    UnknownWorldError,
    brute_force_sat,
    is_n_dense,
    k_sat,
    model_check,
    naive_tableau,
)
from .solver import (
    SATISFIABLE,
    DenseSolver,
    ResourceLimitExceeded,
    SolverConfig,
    check_certificate_detail,
)
from .windows import chi_bound, member_count_bound
from .formula import fset

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_USAGE = 1
EXIT_CEILING = 2
EXIT_INVALID = 3
EXIT_DISAGREE = 4

log = logging.getLogger("densesat")


@dataclass
class RunConfig:
    density: int = 2
    max_worlds: int = 4
    budget: int = 10_000
    emit_certificate: bool = False
    fmt: str = "text"
    ceiling_branches: int = 50_000_000
    ceiling_chain: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.density < 2:
            raise ValueError("density must be >= 2")
        if self.ceiling_branches <= 0 or self.ceiling_chain <= 0 or self.budget <= 0:
            raise ValueError("ceilings must be positive")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            density=self.density,
            emit_certificate=self.emit_certificate,
            max_branches=self.ceiling_branches,
            max_chain=self.ceiling_chain,
        )


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        density=args.density,
        max_worlds=getattr(args, "max_worlds", 4),
        budget=getattr(args, "budget", 10_000),
        emit_certificate=getattr(args, "emit_certificate", False),
        fmt=args.format,
        ceiling_branches=getattr(args, "ceiling_branches", 50_000_000),
        ceiling_chain=getattr(args, "ceiling_chain", 100_000),
        seed=getattr(args, "seed", 0),
    )


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _parse_formula(text: str) -> Formula:
    try:
        return parse(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    cfg = _config_from_args(args)
    f = _parse_formula(args.formula)
    solver = DenseSolver(cfg.solver_config())
    t0 = time.perf_counter()
    try:
        result = solver.sat_formula(f)
    except ResourceLimitExceeded as exc:
        print(f"resource ceiling: {exc}", file=sys.stderr)
        return EXIT_CEILING
    elapsed = time.perf_counter() - t0
    payload = {
        "formula": f.text,
        "density": cfg.density,
        "verdict": result.status,
        "stats": result.stats.as_dict(),
        "seconds": round(elapsed, 6),
    }
    lines = [
        f"formula:  {f.text}",
        f"density:  {cfg.density}",
        f"verdict:  {result.status}",
        f"stats:    {result.stats.as_dict()}",
    ]
    if result.certificate is not None:
        payload["certificate"] = result.certificate
        lines.append("certificate:")
        lines.append(json.dumps(result.certificate, indent=1, sort_keys=True))
    _emit(args, payload, lines)
    return EXIT_SAT if result.status == SATISFIABLE else EXIT_UNSAT


# ---------------------------------------------------------------------------
# oracle


def _oracle_row(f: Formula, cfg: RunConfig) -> dict:
    solver = DenseSolver(cfg.solver_config())
    verdict = solver.sat_formula(f).status
    witness = brute_force_sat(f, cfg.density, cfg.max_worlds)
    tab = naive_tableau(fset([f]), cfg.density, cfg.budget)
    row = {
        "formula": f.text,
        "solver": verdict,
        "brute_force": "model" if witness is not None else "absent",
        "naive_tableau": tab.status,
        "k_sat": "satisfiable" if k_sat(f) else "unsatisfiable",
    }
    disagreements = []
    if witness is not None and verdict != SATISFIABLE:
        disagreements.append("brute_force found a model but solver says unsatisfiable")
    if tab.status == SATURATED and verdict != SATISFIABLE:
        disagreements.append("naive tableau saturated but solver says unsatisfiable")
    if tab.status == CLOSED and verdict == SATISFIABLE:
        disagreements.append("naive tableau closed but solver says satisfiable")
    if verdict == SATISFIABLE and not k_sat(f):
        disagreements.append("dense-satisfiable must imply K-satisfiable")
    row["disagreements"] = disagreements
    return row


def cmd_oracle(args) -> int:
    cfg = _config_from_args(args)
    if args.corpus:
        with open(args.corpus) as fh:
            formulas = load_corpus(json.load(fh))
    else:
        formulas = [_parse_formula(args.formula)]
    rows = [_oracle_row(f, cfg) for f in formulas]
    n_disagree = sum(1 for r in rows if r["disagreements"])
    payload = {"density": cfg.density, "rows": rows, "disagreements": n_disagree}
    lines = []
    for r in rows:
        lines.append(
            f"{r['formula']}: solver={r['solver']} brute={r['brute_force']} "
            f"naive={r['naive_tableau']} k={r['k_sat']}"
        )
        for d in r["disagreements"]:
            lines.append(f"  DISAGREEMENT: {d}")
    lines.append(f"conclusive disagreements: {n_disagree}")
    _emit(args, payload, lines)
    return EXIT_DISAGREE if n_disagree else 0


# ---------------------------------------------------------------------------
# check-cert / check-model


def _schema(name: str) -> dict:
    with importlib.resources.files("densesat.schemas").joinpath(name).open() as fh:
        return json.load(fh)


def validate_schema(doc: dict, schema_name: str) -> None:
    import jsonschema

    schema = _schema(schema_name)
    window = _schema("window.schema.json")
    try:
        from referencing import Registry, Resource

        registry = Registry().with_resources(
            [(s["$id"], Resource.from_contents(s)) for s in (schema, window)]
        )
        jsonschema.Draft202012Validator(schema, registry=registry).validate(doc)
    except ImportError:  # older jsonschema
        resolver = jsonschema.RefResolver.from_schema(
            schema, store={window["$id"]: window, schema["$id"]: schema}
        )
        jsonschema.Draft202012Validator(schema, resolver=resolver).validate(doc)


def cmd_check_cert(args) -> int:
    import jsonschema

    try:
        with open(args.certificate) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(doc, dict) and "certificate" in doc and "format" not in doc:
        doc = doc["certificate"]  # accept a solve report wrapper
    try:
        validate_schema(doc, "certificate.schema.json")
    except jsonschema.ValidationError as exc:
        print(f"schema error: {exc.message} at {list(exc.absolute_path)}", file=sys.stderr)
        return EXIT_USAGE
    ok, why = check_certificate_detail(doc, args.density)
    if ok:
        print("certificate: valid")
        return 0
    print(f"certificate: INVALID ({why})")
    return EXIT_INVALID


def cmd_check_model(args) -> int:
    import jsonschema

    try:
        with open(args.model) as fh:
            doc = json.load(fh)
        validate_schema(doc, "model.schema.json")
        model = KripkeModel.from_json(doc)
    except (OSError, json.JSONDecodeError, ValueError, jsonschema.ValidationError) as exc:
        print(f"cannot load model: {exc}", file=sys.stderr)
        return EXIT_USAGE
    f = _parse_formula(args.formula)
    try:
        holds = model_check(model, args.world, f)
    except UnknownWorldError as exc:
        print(f"bad world: {exc}", file=sys.stderr)
        return EXIT_USAGE
    dense = is_n_dense(model, args.density)
    print(f"formula {'holds' if holds else 'does not hold'} at world {args.world}; "
          f"{args.density}-dense: {dense}")
    return 0 if holds else EXIT_INVALID


# ---------------------------------------------------------------------------
# reduce


def cmd_reduce(args) -> int:
    f = _parse_formula(args.formula)
    try:
        print(tau(args.atom, f).text)
    except AtomOccursError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


# ---------------------------------------------------------------------------
# corpus


def cmd_corpus(args) -> int:
    spec = CorpusSpec(
        max_size=args.max_size,
        max_depth=args.max_depth,
        seed=args.seed,
        random_count=args.random_count,
    )
    exhaustive, extra = build_corpus(spec)
    text = corpus_dumps(corpus_to_json(spec, exhaustive, extra))
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {len(exhaustive)} exhaustive + {len(extra)} random formulas to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args) -> int:
    cfg = _config_from_args(args)
    if args.corpus:
        with open(args.corpus) as fh:
            formulas = load_corpus(json.load(fh))
    else:
        exhaustive, extra = build_corpus(CorpusSpec(seed=cfg.seed))
        formulas = exhaustive + extra
    report: dict = {"items": len(formulas), "densities": {}}
    violations = 0
    for density in (2, 3):
        solver = DenseSolver(
            SolverConfig(
                density=density,
                max_branches=cfg.ceiling_branches,
                max_chain=cfg.ceiling_chain,
            )
        )
        t0 = time.perf_counter()
        per_item = []
        peak = {"max_chain_length": 0, "max_recursion_depth": 0, "peak_live_windows": 0}
        sat_count = 0
        ceilings = 0
        density_violations = 0
        for f in formulas:
            try:
                r = solver.sat_formula(f)
            except ResourceLimitExceeded as exc:
                ceilings += 1
                log.warning("ceiling on %s: %s", f.text, exc)
                continue
            d = r.stats.as_dict()
            sat_count += r.status == SATISFIABLE
            if not (d["chain_bound_ok"] and d["member_bound_ok"]):
                density_violations += 1
            for k in peak:
                peak[k] = max(peak[k], d[k])
            per_item.append({"formula": f.text, "verdict": r.status, **{k: d[k] for k in peak}})
        violations += density_violations
        report["densities"][str(density)] = {
            "seconds": round(time.perf_counter() - t0, 3),
            "satisfiable": sat_count,
            "ceiling_breaches": ceilings,
            "bound_violations": density_violations,
            "peaks": peak,
            "per_item": per_item if args.per_item else None,
        }
    if args.kernels:
        report["kernels"] = _kernel_bench(formulas, cfg)
    lines = [f"corpus items: {report['items']}"]
    for density, d in report["densities"].items():
        lines.append(
            f"density {density}: {d['satisfiable']} satisfiable in {d['seconds']}s, "
            f"peaks {d['peaks']}, ceiling breaches {d['ceiling_breaches']}, "
            f"bound violations {d['bound_violations']}"
        )
    if "kernels" in report:
        for name, kd in report["kernels"].items():
            lines.append(f"kernel {name}: {kd['seconds']}s for density-2 sweep ({kd['status']})")
    _emit(args, report, lines)
    total_ceilings = sum(d["ceiling_breaches"] for d in report["densities"].values())
    if violations:
        return EXIT_DISAGREE
    if total_ceilings:
        return EXIT_CEILING
    return 0


def _kernel_bench(formulas, cfg: RunConfig) -> dict:
    out = {}
    previous = os.environ.get("DENSESAT_KERNEL")
    for name in ("pure", "compiled"):
        if name == "compiled" and not modelscan.HAVE_COMPILED:
            out[name] = {"seconds": None, "status": "not built"}
            continue
        os.environ["DENSESAT_KERNEL"] = name
        t0 = time.perf_counter()
        hits = modelscan.batch_search(formulas, 2, cfg.max_worlds)
        out[name] = {
            "seconds": round(time.perf_counter() - t0, 3),
            "status": f"{sum(h is not None for h in hits)} models found",
        }
    if previous is None:
        os.environ.pop("DENSESAT_KERNEL", None)
    else:
        os.environ["DENSESAT_KERNEL"] = previous
    return out


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors by default; 2 is the resource
    # ceiling code here, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="densesat",
        description="Satisfiability for n-dense modal logics (K + [][]..[]p -> []p).",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, worlds=False, budget=False, cert=False, ceilings=False, seed=False):
        sp.add_argument("--density", type=int, default=2, help="density index n >= 2")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if worlds:
            sp.add_argument("--max-worlds", type=int, default=4)
        if budget:
            sp.add_argument("--budget", type=int, default=10_000)
        if cert:
            sp.add_argument("--emit-certificate", action="store_true")
        if ceilings:
            sp.add_argument("--ceiling-branches", type=int, default=50_000_000)
            sp.add_argument("--ceiling-chain", type=int, default=100_000)
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("solve", help="decide n-dense satisfiability")
    sp.add_argument("formula")
    common(sp, cert=True, ceilings=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("oracle", help="compare solver against the semantic oracles")
    sp.add_argument("formula", nargs="?")
    sp.add_argument("--corpus", help="corpus JSON file to sweep instead of one formula")
    common(sp, worlds=True, budget=True, ceilings=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("check-cert", help="validate a satisfiability certificate")
    sp.add_argument("certificate", help="certificate JSON file")
    sp.add_argument("--density", type=int, default=None)
    sp.set_defaults(func=cmd_check_cert)

    sp = sub.add_parser("check-model", help="model-check a formula in a Kripke model")
    sp.add_argument("model", help="model JSON file")
    sp.add_argument("formula")
    sp.add_argument("--world", type=int, default=0)
    sp.add_argument("--density", type=int, default=2)
    sp.set_defaults(func=cmd_check_model)

    sp = sub.add_parser("reduce", help="apply the guarded-box translation")
    sp.add_argument("atom")
    sp.add_argument("formula")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("corpus", help="emit the test corpus")
    sp.add_argument("--out", default="-")
    sp.add_argument("--max-size", type=int, default=7)
    sp.add_argument("--max-depth", type=int, default=2)
    sp.add_argument("--random-count", type=int, default=40)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_corpus)

    sp = sub.add_parser("bench", help="corpus run with structural-bound accounting")
    sp.add_argument("--corpus", help="corpus JSON file (default: built-in corpus)")
    sp.add_argument("--per-item", action="store_true")
    sp.add_argument("--kernels", action="store_true", help="also time pure vs compiled sweep")
    common(sp, worlds=True, ceilings=True, seed=True)
    sp.set_defaults(func=cmd_bench)

    return p


def main(argv=None) -> int:
    level = os.environ.get("DENSESAT_LOG", "warning").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "oracle" and not args.corpus and not args.formula:
            parser.error("oracle needs a formula or --corpus")
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
