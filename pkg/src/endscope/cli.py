"""Command-line front end.

Subcommands: analyze, coxeter, graph-product, cayley, tower, explain.
Exit codes: 0 success, 2 input error, 3 contradiction detected, 4 budget or
cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import coxeter as coxeter_mod
from .atoms import atom_from_name
from .cayley import build_ball, estimate_ends, oracle_from_spec
from .errors import (
    ContradictionError,
    DiagramTooLargeError,
    EndscopeError,
    MemoryCapExceededError,
    OrbitBudgetExceededError,
    ParseError,
)
from .inference import certificate_as_dict, explain, infer
from .model import Artin, Coxeter, GraphProduct, parse_document
from .report import (
    analysis_report,
    artin_section,
    coxeter_section,
    graph_product_section,
    input_digest,
    jsonable,
    render_dot,
)
from .towers import lim1_report, ml_check_window, ml_decide_constant, parse_tower

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONTRADICTION = 3
EXIT_BUDGET = 4

_BUDGET_ERRORS = (OrbitBudgetExceededError, MemoryCapExceededError, DiagramTooLargeError)


def _emit(payload):
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=False) + "\n")


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", 0, 0)


def _load_registry(path):
    return parse_document(_read(path))


def _find_group(registry, name, kind=None):
    if name not in registry.groups:
        raise ParseError(f"group {name!r} not declared", 0, 0)
    expr = registry.groups[name]
    if kind is not None and not isinstance(expr, kind):
        raise ParseError(f"group {name!r} is not a {kind.__name__} description", 0, 0)
    return expr


def cmd_analyze(args):
    text = _read(args.file)
    registry = parse_document(text)
    _emit(analysis_report(registry, text))
    return EXIT_OK


def cmd_coxeter(args):
    text = _read(args.file)
    registry = parse_document(text)
    expr = _find_group(registry, args.group, Coxeter)
    _emit({
        "schemaVersion": 1,
        "inputDigest": input_digest(text),
        "sections": [coxeter_section(args.group, expr)],
        "warnings": [],
    })
    return EXIT_OK


def cmd_graph_product(args):
    text = _read(args.file)
    registry = parse_document(text)
    expr = _find_group(registry, args.group, GraphProduct)
    facts = infer(registry)
    section = graph_product_section(args.group, expr, registry, facts)
    warnings = []
    if section["semistability"] == "unknown":
        warnings.append({
            "kind": "undetermined_semistability",
            "group": args.group,
            "detail": "vertex profiles leave the criterion undecided",
        })
    _emit({
        "schemaVersion": 1,
        "inputDigest": input_digest(text),
        "sections": [section],
        "warnings": warnings,
    })
    return EXIT_OK


def cmd_cayley(args):
    oracle = oracle_from_spec(args.oracle)
    ball = build_ball(oracle, args.radius, element_cap=args.element_cap)
    sections = [{
        "type": "ball",
        "oracle": args.oracle,
        "radius": ball.radius,
        "elements": len(ball.order),
        "exhausted": ball.exhausted,
        "sphere_sizes": [len(ball.sphere(d)) for d in range(ball.radius + 1)],
    }]
    warnings = []
    if args.window:
        a, b = args.window
        estimate = estimate_ends(ball, a, b)
        sections.append({"type": "end_estimate", **estimate.as_dict()})
        warnings.append({
            "kind": "heuristic_verdict",
            "detail": "finite-radius estimate; unbounded components are"
                      " approximated by outer-sphere contact",
        })
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(render_dot(ball))
    _emit({
        "schemaVersion": 1,
        "inputDigest": input_digest(args.oracle),
        "sections": sections,
        "warnings": warnings,
    })
    return EXIT_OK


def cmd_tower(args):
    text = _read(args.file)
    tower = parse_tower(text)
    if tower.constant:
        verdict = ml_decide_constant(tower.ranks[0], tower.bondings[0])
        window = None
    else:
        n = len(tower.bondings)
        _, verdict = ml_check_window(tower, 1, n)
        window = n
    lim1 = lim1_report(verdict)
    _emit({
        "schemaVersion": 1,
        "inputDigest": input_digest(text),
        "sections": [{
            "type": "tower",
            "constant": tower.constant,
            "window": window,
            "verdict": verdict.as_dict(),
            "lim1": lim1,
        }],
        "warnings": [] if tower.constant else [{
            "kind": "finite_window",
            "detail": "explicit towers are judged on a finite window only",
        }],
    })
    return EXIT_OK


def cmd_explain(args):
    text = _read(args.file)
    registry = parse_document(text)
    try:
        atom = atom_from_name(args.atom)
    except KeyError:
        raise ParseError(f"unknown property atom {args.atom!r}", 0, 0)
    facts = infer(registry)
    sys.stdout.write(explain(facts, args.group, atom, holds=not args.negated) + "\n")
    return EXIT_OK


def cmd_dot(args):
    text = _read(args.file)
    registry = parse_document(text)
    expr = _find_group(registry, args.group)
    if isinstance(expr, (Coxeter, Artin)):
        sys.stdout.write(render_dot(expr.diagram))
    elif isinstance(expr, GraphProduct):
        sys.stdout.write(render_dot(expr.graph))
    else:
        raise ParseError(f"group {args.group!r} has no diagram", 0, 0)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="endscope",
        description="Deciders, estimators and certified inference for"
                    " behavior-at-infinity invariants of groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report for a group description file")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("coxeter", help="finite type and end count of a Coxeter group")
    p.add_argument("file")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_coxeter)

    p = sub.add_parser("graph-product", help="ends and semistability of a graph product")
    p.add_argument("file")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_graph_product)

    p = sub.add_parser("cayley", help="Cayley ball construction and end estimate")
    p.add_argument("--oracle", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--window", type=int, nargs=2, metavar=("A", "B"))
    p.add_argument("--dot", help="write the ball as DOT to this path")
    p.add_argument("--element-cap", type=int, default=2_000_000)
    p.set_defaults(func=cmd_cayley)

    p = sub.add_parser("tower", help="Mittag-Leffler verdict for an abelian tower")
    p.add_argument("file")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("explain", help="derivation tree for one derived fact")
    p.add_argument("file")
    p.add_argument("--group", required=True)
    p.add_argument("--atom", required=True)
    p.add_argument("--negated", action="store_true")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("dot", help="DOT export of a declared diagram")
    p.add_argument("file")
    p.add_argument("--group", required=True)
    p.set_defaults(func=cmd_dot)

    parser.add_argument("--budget", type=int, default=None,
                        help="braid-orbit state budget override")
    parser.add_argument("--tietze-budget", type=int, default=None,
                        help="Tietze simplification step budget override")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    if args.budget is not None:
        coxeter_mod.DEFAULT_ORBIT_BUDGET = args.budget
    if args.tietze_budget is not None:
        from . import graph_products
        graph_products.TIETZE_BUDGET = args.tietze_budget
    try:
        return args.func(args)
    except ContradictionError as exc:
        _emit({
            "schemaVersion": 1,
            "contradiction": {
                "group": exc.group,
                "atom": exc.atom.value,
                "holds": jsonable(certificate_as_dict(exc.cert_holds)),
                "fails": jsonable(certificate_as_dict(exc.cert_fails)),
            },
        })
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONTRADICTION
    except _BUDGET_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except (EndscopeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
