"""Command-line front end.

Exit codes::

    0  success
    2  bad arguments (including k < 1 and qtable on a bayesian model)
    3  model or evidence file could not be read or parsed
    4  model failed validation
    5  no solution (fewer than k positive-score explanations found)
    6  capacity guard exceeded
    7  total conflict in Dempster combination
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .dst import singleton_commonality
from .errors import CapacityError, ModelParseError, NoSolutionError, TotalConflictError
from .fileio import dump_evidence, dump_model, load_evidence, load_model, model_digest
from .ga import GaParams, k_mpe, score_inversions
from .generate import random_bayesian, random_dst
from .model import BAYESIAN, DST, Evidence, validate_model
from .oracle import ENUMERATION_GUARD, enumerate_top_k

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVALID = 4
EXIT_NO_SOLUTION = 5
EXIT_CAPACITY = 6
EXIT_CONFLICT = 7


class UsageError(Exception):
    pass


def _selection(text: str) -> tuple[str, int]:
    """``tournament``, ``tournament:3``, ``tournament(3)`` or ``roulette``."""
    name, _, arg = text.replace("(", ":").rstrip(")").partition(":")
    if name == "roulette" and not arg:
        return name, 2
    if name == "tournament":
        try:
            size = int(arg) if arg else 2
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad tournament size in {text!r}") from None
        return name, size
    raise argparse.ArgumentTypeError(f"unknown selection {text!r}")


def _load(args, need_evidence=True):
    model = load_model(args.model)
    report = validate_model(model)
    if report:
        raise _Invalid(report)
    ev = Evidence()
    if need_evidence and args.evidence is not None:
        ev = load_evidence(args.evidence, model)
    return model, ev


class _Invalid(Exception):
    def __init__(self, report):
        super().__init__(f"{len(report)} validation error(s)")
        self.report = report


def _rows(model, results, exact=False):
    return [
        {
            "rank": r.rank,
            "assignment": model.labels(r.config),
            "score": r.score,
            "log_score": r.log_score if r.log_score != -math.inf else None,
            "generations_used": None if exact else r.generations_used,
        }
        for r in results
    ]


def _emit(args, doc: dict, text: str) -> None:
    body = json.dumps(doc, indent=2) + "\n" if args.format == "json" else text
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)


def _text_results(doc: dict) -> str:
    lines = [f"# {doc['command']}  model sha256 {doc['query']['model_sha256'][:16]}  k={doc['query']['k']}"]
    for row in doc["results"]:
        assign = " ".join(f"{k}={v}" for k, v in row["assignment"].items())
        ln = "-inf" if row["log_score"] is None else f"{row['log_score']:.10f}"
        lines.append(f"{row['rank']:>4}  {row['score']:.10g}  ln={ln}  gens={row['generations_used'] if row['generations_used'] is not None else '-'}  {assign}")
    for w in doc["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    model, ev = _load(args)
    selection, tsize = args.selection
    try:
        params = GaParams(
            population_size=args.pop,
            p_m=args.pm,
            p_c=args.pc,
            max_generations=args.gens,
            stagnation_window=args.stagnation,
            elitism=args.elitism,
            selection=selection,
            tournament_size=tsize,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    results = k_mpe(model, ev, params, args.k)
    doc = {
        "command": "solve",
        "query": {
            "model_sha256": model_digest(args.model),
            "evidence": dump_evidence(ev, model),
            "k": args.k,
            "params": params.as_dict(),
            "seed": args.seed,
        },
        "results": _rows(model, results),
        "warnings": score_inversions(results),
    }
    _emit(args, doc, _text_results(doc))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    model, ev = _load(args)
    res = enumerate_top_k(model, ev, args.k, guard=args.guard)
    warnings = []
    if len(res.top) < args.k:
        warnings.append(f"only {len(res.top)} evidence-compatible configurations exist")
    doc = {
        "command": "oracle",
        "query": {
            "model_sha256": model_digest(args.model),
            "evidence": dump_evidence(ev, model),
            "k": args.k,
            "params": None,
            "seed": None,
            "total_enumerated": res.total_enumerated,
        },
        "results": _rows(model, res.top, exact=True),
        "warnings": warnings,
    }
    _emit(args, doc, _text_results(doc))
    return EXIT_OK


def cmd_check(args) -> int:
    model = load_model(args.model)
    report = validate_model(model)
    for v in report:
        print(v)
    if not report:
        print(f"ok: {model.kind} model, {model.n} variables, {len(model.universes)} universes")
    return EXIT_OK if not report else EXIT_INVALID


def cmd_qtable(args) -> int:
    model, _ = _load(args, need_evidence=False)
    if model.kind != DST:
        raise UsageError("qtable needs a dst model")
    tables = []
    for i, u in enumerate(model.universes, start=1):
        table = singleton_commonality(u)
        frames = [model.variables[v].frame for v in u.variables]
        rows = []
        for t, q in zip(u.frame(), table.q):
            rows.append({"tuple": [f[x] for f, x in zip(frames, t)], "q": q})
        tables.append({"index": i, "vars": [model.variables[v].name for v in u.variables], "rows": rows})
    lines = []
    for tab in tables:
        lines.append(f"Q_{tab['index']} in vars {','.join(tab['vars'])}")
        for row in tab["rows"]:
            lines.append(f"  ({','.join(row['tuple'])})  {row['q']:.12f}")
    _emit(args, {"command": "qtable", "tables": tables}, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.n_vars < 1:
        raise UsageError("--n-vars must be at least 1")
    if args.kind == BAYESIAN:
        model = random_bayesian(args.n_vars, args.max_frame, args.max_parents, seed=args.seed)
    else:
        model = random_dst(
            args.n_vars,
            args.max_frame,
            n_universes=args.universes,
            universe_size=args.universe_size,
            focal_count=args.focal_count,
            seed=args.seed,
        )
    args.format = "json"
    _emit(args, dump_model(model), "")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vbsmpe", description="k most probable / plausible explanations in valuation-based systems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, evidence=True, fmt=True):
        p.add_argument("--model", required=True, help="model JSON file")
        if evidence:
            p.add_argument("--evidence", help="evidence JSON file (default: no evidence)")
            p.add_argument("--k", type=int, default=1, help="number of explanations")
        if fmt:
            p.add_argument("--format", choices=("json", "text"), default="json")
            p.add_argument("--out", help="write here instead of standard output")

    d = GaParams()
    p = sub.add_parser("solve", help="genetic k-best search")
    common(p)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--pop", type=int, default=d.population_size, help="population size")
    p.add_argument("--pm", type=float, default=d.p_m, help="per-locus mutation probability")
    p.add_argument("--pc", type=float, default=d.p_c, help="per-pair crossover probability")
    p.add_argument("--gens", type=int, default=d.max_generations, help="maximum generations")
    p.add_argument("--stagnation", type=int, default=d.stagnation_window, help="stop after this many generations without improvement (0 = never)")
    p.add_argument("--elitism", type=int, default=d.elitism)
    p.add_argument("--selection", type=_selection, default=(d.selection, d.tournament_size), help="tournament[:size] or roulette")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact enumeration (small models only)")
    common(p)
    p.add_argument("--guard", type=int, default=ENUMERATION_GUARD, help="maximum configurations to enumerate")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="validate a model file")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("qtable", help="print singleton commonality tables of a dst model")
    common(p, evidence=False)
    p.set_defaults(func=cmd_qtable)

    p = sub.add_parser("gen", help="emit a random valid model")
    p.add_argument("--kind", choices=(BAYESIAN, DST), required=True)
    p.add_argument("--n-vars", type=int, required=True)
    p.add_argument("--max-frame", type=int, default=2)
    p.add_argument("--max-parents", type=int, default=2, help="bayesian: parents per node")
    p.add_argument("--universes", type=int, help="dst: number of mass functions (default n-vars)")
    p.add_argument("--universe-size", type=int, default=2, help="dst: variables per mass function")
    p.add_argument("--focal-count", type=int, default=3, help="dst: focal sets per mass function")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _Invalid as exc:
        for v in exc.report:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_INVALID
    except NoSolutionError as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except TotalConflictError as exc:
        print(f"total conflict: {exc}", file=sys.stderr)
        return EXIT_CONFLICT


if __name__ == "__main__":
    sys.exit(main())
