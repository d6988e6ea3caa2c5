"""Structured report assembly and DOT export.

Reports are plain JSON-shaped dictionaries with a schema version and a
content digest of the input, built deterministically so identical inputs
serialize byte for byte.
"""

from __future__ import annotations

import hashlib

from .atoms import EndCount, PropertyAtom
from .cayley import BallGraph
from .coxeter import CoxeterSystem, artin_one_ended, coxeter_ends, is_finite_type
from .graph_products import graph_product_ends, graph_product_semistable
from .graphs import LabeledGraph
from .inference import certificate_as_dict, infer, _vertex_profile
from .model import Artin, Coxeter, GraphProduct, GroupRegistry, serialize_expr

SCHEMA_VERSION = 1


def input_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def jsonable(value):
    """Recursively convert report values into JSON-friendly primitives."""
    if isinstance(value, (EndCount, PropertyAtom)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = list(value)
        if isinstance(value, (set, frozenset)):
            items = sorted(items, key=str)
        return [jsonable(v) for v in items]
    return value


def coxeter_section(name, expr):
    sys = CoxeterSystem(expr.diagram)
    ft = is_finite_type(sys)
    report = coxeter_ends(sys)
    return jsonable({
        "type": "coxeter",
        "group": name,
        "finite_type": {
            "is_finite": ft.is_finite,
            "components": [
                {"vertices": comp, "family": fam} for comp, fam in ft.component_types
            ],
        },
        "ends": report.ends,
        "witness": report.witness,
    })


def artin_section(name, expr):
    report = artin_one_ended(expr.diagram)
    return jsonable({
        "type": "artin",
        "group": name,
        "one_ended": report.one_ended,
        "ends": report.ends,
    })


def graph_product_section(name, expr, registry, facts):
    from .graph_products import GraphProductSpec

    profiles = {}
    complete = True
    for vertex, ref in expr.vertex_groups:
        prof, _ = _vertex_profile(registry, facts, ref)
        profiles[vertex] = prof
        if prof.finite is None or prof.ends is None:
            complete = False
    spec = GraphProductSpec(expr.graph, profiles)
    section = {"type": "graph_product", "group": name}
    if complete:
        ends = graph_product_ends(spec)
        section["ends"] = ends.ends
        section["ends_witness"] = ends.witness
    else:
        section["ends"] = None
        section["ends_witness"] = {"kind": "incomplete_vertex_profiles"}
    if expr.graph.is_connected():
        ss = graph_product_semistable(spec)
        section["semistability"] = ss.verdict
        section["semistability_witness"] = ss.witness
    else:
        section["semistability"] = "unknown"
        section["semistability_witness"] = {"kind": "disconnected_graph"}
    return jsonable(section)


def facts_section(facts):
    rows = []
    for group, atom, holds in sorted(
        facts.facts(), key=lambda f: (f[0], f[1].value, f[2])
    ):
        cert = facts.get(group, atom, holds)
        rows.append({
            "group": group,
            "atom": atom.value,
            "holds": holds,
            "certificate": certificate_as_dict(cert),
        })
    return {"type": "facts", "facts": rows}


def analysis_report(registry: GroupRegistry, text: str):
    """Full `analyze` report: structural deciders plus inference."""
    sections = []
    sections.append({
        "type": "registry",
        "groups": [
            {"name": name, "expr": serialize_expr(expr)}
            for name, expr in registry.groups.items()
        ],
    })
    facts = infer(registry)
    warnings = []
    for name, expr in registry.groups.items():
        if isinstance(expr, Coxeter) and expr.diagram.vertices:
            sections.append(coxeter_section(name, expr))
        elif isinstance(expr, Artin) and expr.diagram.vertices:
            sections.append(artin_section(name, expr))
        elif isinstance(expr, GraphProduct) and expr.graph.vertices:
            section = graph_product_section(name, expr, registry, facts)
            sections.append(section)
            if section["semistability"] == "unknown":
                warnings.append({
                    "kind": "undetermined_semistability",
                    "group": name,
                    "detail": "vertex profiles leave the criterion undecided",
                })
    sections.append(facts_section(facts))
    return {
        "schemaVersion": SCHEMA_VERSION,
        "inputDigest": input_digest(text),
        "sections": sections,
        "warnings": warnings,
    }


# --- DOT export ---------------------------------------------------------------

def render_dot(graph) -> str:
    """Deterministic DOT text for a LabeledGraph or a BallGraph."""
    if isinstance(graph, LabeledGraph):
        lines = ["graph diagram {"]
        for v in graph.vertices:
            lines.append(f'  "{v}";')
        for u, v, m in graph.sorted_edges():
            lines.append(f'  "{u}" -- "{v}" [label="{m}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if isinstance(graph, BallGraph):
        data = graph.serialize()
        lines = ["graph ball {"]
        for el in data["elements"]:
            lines.append(f'  n{el["id"]} [label="d={el["distance"]}"];')
        for e in data["edges"]:
            lines.append(f'  n{e["u"]} -- n{e["v"]} [label="{e["gen"]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot render {type(graph).__name__} as DOT")
