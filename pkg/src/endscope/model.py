"""Group description AST, registry, and the text-format parser.

The text format is line-oriented with ``#`` comments:

    group W  = coxeter { verts a b c ; edge a b 3 ; }
    group A  = artin { verts a b ; edge a b 3 ; }
    group P  = graph_product { verts u:Z2 v:F2 ; edge u v ; }
    group G  = amalgam(A, B, C) edge_finite c_index_finite_in_both reduced
    group H  = hnn(Base, Assoc) ascending finite_index_image
    group E  = extension(K, Q)
    group D  = direct_product(A, B)
    group C  = commensurated_pair(G, Q) infinite_index
    group K  = known(lamplighter)
    group F2 = free(2)
    group Z2 = finite(2)
    group Zn = free_abelian(3)
    assert G : semistable
    assert G : not semistable
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .atoms import PropertyAtom, atom_from_name
from .errors import (
    DanglingReferenceError,
    DuplicateNameError,
    InvalidEdgeLabelError,
    ParseError,
)
from .graphs import LabeledGraph


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Known:
    name: str


@dataclass(frozen=True)
class Finite:
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise InvalidEdgeLabelError(f"finite order must be >= 1, got {self.order}")


@dataclass(frozen=True)
class FreeAbelian:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise InvalidEdgeLabelError(f"rank must be >= 0, got {self.rank}")


@dataclass(frozen=True)
class Free:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise InvalidEdgeLabelError(f"rank must be >= 0, got {self.rank}")


@dataclass(frozen=True)
class Coxeter:
    diagram: LabeledGraph


@dataclass(frozen=True)
class Artin:
    diagram: LabeledGraph


@dataclass(frozen=True)
class GraphProduct:
    graph: LabeledGraph  # labels unused; every edge stored with label 2
    vertex_groups: tuple  # tuple of (vertex, group ref), in vertex order


@dataclass(frozen=True)
class Amalgam:
    a: str
    b: str
    c: str
    edge_finite: bool = False
    c_index_finite_in_both: bool = False
    reduced: bool = False


@dataclass(frozen=True)
class HNN:
    base: str
    assoc: str
    ascending: bool = False
    finite_index_image: bool = False


@dataclass(frozen=True)
class Extension:
    kernel: str
    quotient: str


@dataclass(frozen=True)
class DirectProduct:
    factors: tuple


@dataclass(frozen=True)
class CommensuratedPair:
    ambient: str
    subgroup: str
    infinite_index: bool = False


GroupExpr = (
    Known, Finite, FreeAbelian, Free, Coxeter, Artin, GraphProduct,
    Amalgam, HNN, Extension, DirectProduct, CommensuratedPair,
)


@dataclass(frozen=True)
class AttributeAssertion:
    target: str
    atom: PropertyAtom
    holds: bool
    source: str = "user"  # "user" or "database"


def expr_references(expr):
    """Names of other registry entries this expression refers to."""
    if isinstance(expr, GraphProduct):
        return tuple(ref for _, ref in expr.vertex_groups)
    if isinstance(expr, Amalgam):
        return (expr.a, expr.b, expr.c)
    if isinstance(expr, HNN):
        return (expr.base, expr.assoc)
    if isinstance(expr, Extension):
        return (expr.kernel, expr.quotient)
    if isinstance(expr, DirectProduct):
        return expr.factors
    if isinstance(expr, CommensuratedPair):
        return (expr.ambient, expr.subgroup)
    return ()


@dataclass
class GroupRegistry:
    """Declared groups plus their asserted attributes, in declaration order."""

    groups: dict = field(default_factory=dict)  # name -> GroupExpr
    assertions: dict = field(default_factory=dict)  # name -> list[AttributeAssertion]

    def add(self, name, expr):
        if name in self.groups:
            raise DuplicateNameError(name)
        self.groups[name] = expr
        self.assertions.setdefault(name, [])

    def assert_attr(self, assertion: AttributeAssertion):
        if assertion.target not in self.groups:
            raise DanglingReferenceError(assertion.target)
        self.assertions[assertion.target].append(assertion)

    def validate(self):
        for name, expr in self.groups.items():
            for ref in expr_references(expr):
                if ref not in self.groups:
                    raise DanglingReferenceError(ref)
        # reference graph must be acyclic
        state = {}  # 0 = visiting, 1 = done

        def visit(n, trail):
            if state.get(n) == 1:
                return
            if state.get(n) == 0:
                raise DanglingReferenceError(f"cycle through '{n}'")
            state[n] = 0
            for ref in expr_references(self.groups[n]):
                visit(ref, trail + [n])
            state[n] = 1

        for name in self.groups:
            visit(name, [])
        return self

    def __eq__(self, other):
        return (
            isinstance(other, GroupRegistry)
            and self.groups == other.groups
            and self.assertions == other.assertions
        )


# --- Parser ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"[(){};:,=]|[^\s(){};:,=]+")

_AMALGAM_FLAGS = ("edge_finite", "c_index_finite_in_both", "reduced")
_HNN_FLAGS = ("ascending", "finite_index_image")
_CP_FLAGS = ("infinite_index",)


class _Tokens:
    def __init__(self, text):
        self.items = []  # (token, line, col)
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0]
            for m in _TOKEN_RE.finditer(line):
                self.items.append((m.group(0), lineno, m.start() + 1))
        self.pos = 0

    def peek(self):
        return self.items[self.pos][0] if self.pos < len(self.items) else None

    def next(self, expected=None):
        if self.pos >= len(self.items):
            last = self.items[-1] if self.items else ("", 1, 1)
            raise ParseError(
                f"unexpected end of input (expected {expected or 'more input'})",
                last[1], last[2],
            )
        tok, line, col = self.items[self.pos]
        self.pos += 1
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, got {tok!r}", line, col)
        return tok, line, col

    def error(self, message):
        if self.pos < len(self.items):
            _, line, col = self.items[self.pos]
        elif self.items:
            _, line, col = self.items[-1]
        else:
            line, col = 1, 1
        raise ParseError(message, line, col)


def _parse_int(tokens, what):
    tok, line, col = tokens.next(expected=None)
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected {what}, got {tok!r}", line, col)


def _parse_diagram(tokens, labeled):
    tokens.next("{")
    verts = []
    vertex_groups = []
    edges = []
    while True:
        tok = tokens.peek()
        if tok == "}":
            tokens.next("}")
            break
        if tok == "verts":
            tokens.next("verts")
            while tokens.peek() not in (";", None):
                name, line, col = tokens.next()
                if name in ("edge", "verts", "{", "}"):
                    raise ParseError(f"bad vertex name {name!r}", line, col)
                if labeled == "graph_product":
                    tokens.next(":")
                    ref, _, _ = tokens.next()
                    vertex_groups.append((name, ref))
                verts.append(name)
            tokens.next(";")
        elif tok == "edge":
            tokens.next("edge")
            u, _, _ = tokens.next()
            v, _, _ = tokens.next()
            if labeled == "graph_product":
                label = 2
            else:
                label = _parse_int(tokens, "edge label")
                if label < 2:
                    raise InvalidEdgeLabelError(label)
            tokens.next(";")
            edges.append((u, v, label))
        else:
            tokens.error(f"expected 'verts', 'edge' or '}}', got {tok!r}")
    graph = LabeledGraph.build(verts, edges)
    if labeled == "graph_product":
        return graph, tuple(vertex_groups)
    return graph


def _parse_refs(tokens, count=None):
    tokens.next("(")
    refs = []
    while True:
        tok, _, _ = tokens.next()
        refs.append(tok)
        nxt, line, col = tokens.next()
        if nxt == ")":
            break
        if nxt != ",":
            raise ParseError(f"expected ',' or ')', got {nxt!r}", line, col)
    if count is not None and len(refs) != count:
        tokens.error(f"expected {count} references, got {len(refs)}")
    return refs


def _parse_flags(tokens, allowed):
    flags = set()
    while tokens.peek() in allowed:
        tok, _, _ = tokens.next()
        flags.add(tok)
    return flags


def parse_document(text: str) -> GroupRegistry:
    """Parse a group-description document into a validated registry."""
    tokens = _Tokens(text)
    reg = GroupRegistry()
    while tokens.peek() is not None:
        kw, line, col = tokens.next()
        if kw == "group":
            name, _, _ = tokens.next()
            tokens.next("=")
            ctor, cl, cc = tokens.next()
            if ctor == "coxeter":
                expr = Coxeter(_parse_diagram(tokens, "coxeter"))
            elif ctor == "artin":
                expr = Artin(_parse_diagram(tokens, "artin"))
            elif ctor == "graph_product":
                graph, vgs = _parse_diagram(tokens, "graph_product")
                expr = GraphProduct(graph, vgs)
            elif ctor == "amalgam":
                a, b, c = _parse_refs(tokens, 3)
                flags = _parse_flags(tokens, _AMALGAM_FLAGS)
                expr = Amalgam(
                    a, b, c,
                    edge_finite="edge_finite" in flags,
                    c_index_finite_in_both="c_index_finite_in_both" in flags,
                    reduced="reduced" in flags,
                )
            elif ctor == "hnn":
                base, assoc = _parse_refs(tokens, 2)
                flags = _parse_flags(tokens, _HNN_FLAGS)
                expr = HNN(
                    base, assoc,
                    ascending="ascending" in flags,
                    finite_index_image="finite_index_image" in flags,
                )
            elif ctor == "extension":
                k, q = _parse_refs(tokens, 2)
                expr = Extension(k, q)
            elif ctor == "direct_product":
                expr = DirectProduct(tuple(_parse_refs(tokens)))
            elif ctor == "commensurated_pair":
                g, q = _parse_refs(tokens, 2)
                flags = _parse_flags(tokens, _CP_FLAGS)
                expr = CommensuratedPair(g, q, infinite_index="infinite_index" in flags)
            elif ctor == "known":
                (catalog,) = _parse_refs(tokens, 1)
                expr = Known(catalog)
            elif ctor == "finite":
                tokens.next("(")
                order = _parse_int(tokens, "order")
                tokens.next(")")
                expr = Finite(order)
            elif ctor == "free":
                tokens.next("(")
                rank = _parse_int(tokens, "rank")
                tokens.next(")")
                expr = Free(rank)
            elif ctor == "free_abelian":
                tokens.next("(")
                rank = _parse_int(tokens, "rank")
                tokens.next(")")
                expr = FreeAbelian(rank)
            else:
                raise ParseError(f"unknown constructor {ctor!r}", cl, cc)
            reg.add(name, expr)
        elif kw == "assert":
            target, _, _ = tokens.next()
            tokens.next(":")
            tok, al, ac = tokens.next()
            holds = True
            if tok == "not":
                holds = False
                tok, al, ac = tokens.next()
            try:
                atom = atom_from_name(tok)
            except KeyError:
                raise ParseError(f"unknown property atom {tok!r}", al, ac)
            reg.assert_attr(AttributeAssertion(target, atom, holds))
        else:
            raise ParseError(f"expected 'group' or 'assert', got {kw!r}", line, col)
    return reg.validate()


# --- Serializer (canonical text, round-trips through parse_document) --------

def _diagram_text(graph: LabeledGraph, vertex_groups=None, labeled=True):
    parts = []
    if vertex_groups is not None:
        vg = dict(vertex_groups)
        parts.append("verts " + " ".join(f"{v}:{vg[v]}" for v in graph.vertices) + " ;")
    elif graph.vertices:
        parts.append("verts " + " ".join(str(v) for v in graph.vertices) + " ;")
    for u, v, m in graph.sorted_edges():
        parts.append(f"edge {u} {v} {m} ;" if labeled else f"edge {u} {v} ;")
    return "{ " + " ".join(parts) + " }"


def serialize_expr(expr) -> str:
    if isinstance(expr, Coxeter):
        return "coxeter " + _diagram_text(expr.diagram)
    if isinstance(expr, Artin):
        return "artin " + _diagram_text(expr.diagram)
    if isinstance(expr, GraphProduct):
        return "graph_product " + _diagram_text(expr.graph, expr.vertex_groups, labeled=False)
    if isinstance(expr, Amalgam):
        flags = [f for f in _AMALGAM_FLAGS if getattr(expr, f)]
        return f"amalgam({expr.a}, {expr.b}, {expr.c})" + "".join(" " + f for f in flags)
    if isinstance(expr, HNN):
        flags = [f for f in _HNN_FLAGS if getattr(expr, f)]
        return f"hnn({expr.base}, {expr.assoc})" + "".join(" " + f for f in flags)
    if isinstance(expr, Extension):
        return f"extension({expr.kernel}, {expr.quotient})"
    if isinstance(expr, DirectProduct):
        return "direct_product(" + ", ".join(expr.factors) + ")"
    if isinstance(expr, CommensuratedPair):
        suffix = " infinite_index" if expr.infinite_index else ""
        return f"commensurated_pair({expr.ambient}, {expr.subgroup})" + suffix
    if isinstance(expr, Known):
        return f"known({expr.name})"
    if isinstance(expr, Finite):
        return f"finite({expr.order})"
    if isinstance(expr, Free):
        return f"free({expr.rank})"
    if isinstance(expr, FreeAbelian):
        return f"free_abelian({expr.rank})"
    raise TypeError(f"unknown expression {expr!r}")


def serialize_document(reg: GroupRegistry) -> str:
    lines = []
    for name, expr in reg.groups.items():
        lines.append(f"group {name} = {serialize_expr(expr)}")
    for name in reg.groups:
        for a in reg.assertions.get(name, []):
            if a.source != "user":
                continue
            neg = "" if a.holds else "not "
            lines.append(f"assert {a.target} : {neg}{a.atom.value}")
    return "\n".join(lines) + "\n"
