"""Finite labeled graphs and the graph utilities shared across the deciders.

A LabeledGraph carries presentation diagrams: vertices are generator names,
an edge labeled m >= 2 records a relation of order m, and the absence of an
edge means no relation (infinite order).  Small simplicial 2-complexes live
here too since the flag/cut-vertex checks operate on the same carrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import (
    DiagramTooLargeError,
    InvalidEdgeLabelError,
    UnknownVertexError,
)

SEPARATOR_VERTEX_CAP = 24


def _edge_key(u, v):
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    """Finite simple graph with integer edge labels (label >= 2).

    Vertex order is preserved; it doubles as the generator order for
    Coxeter/Artin systems built on top of the diagram.
    """

    vertices: tuple
    edges: dict = field(default_factory=dict)  # (u, v) with u <= v -> label

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise InvalidEdgeLabelError(f"duplicate vertex {v!r}")
            seen.add(v)
        normalized = {}
        for (u, v), m in self.edges.items():
            if u == v:
                raise InvalidEdgeLabelError(f"self-loop at {u!r}")
            if u not in seen or v not in seen:
                raise UnknownVertexError(u if u not in seen else v)
            if not isinstance(m, int) or m < 2:
                raise InvalidEdgeLabelError(m)
            key = _edge_key(u, v)
            if key in normalized:
                raise InvalidEdgeLabelError(f"duplicate edge {key}")
            normalized[key] = m
        object.__setattr__(self, "edges", normalized)

    @staticmethod
    def build(vertices, edges=()):
        """edges: iterable of (u, v, label)."""
        return LabeledGraph(tuple(vertices), {_edge_key(u, v): m for u, v, m in edges})

    def __len__(self):
        return len(self.vertices)

    def has_edge(self, u, v):
        return _edge_key(u, v) in self.edges

    def label(self, u, v):
        """Edge label, or None when the vertices are unrelated (m = infinity)."""
        return self.edges.get(_edge_key(u, v))

    def neighbors(self, v):
        if v not in self.vertices:
            raise UnknownVertexError(v)
        return tuple(u for u in self.vertices if u != v and self.has_edge(u, v))

    def degree(self, v):
        return len(self.neighbors(v))

    def is_complete(self):
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2

    def sorted_edges(self):
        order = {v: i for i, v in enumerate(self.vertices)}
        return sorted(
            ((u, v, m) for (u, v), m in self.edges.items()),
            key=lambda e: (order[e[0]], order[e[1]]),
        )

    def components(self):
        """Connected components as tuples of vertices, in vertex order."""
        remaining = set(self.vertices)
        comps = []
        for v in self.vertices:
            if v not in remaining:
                continue
            comp = {v}
            stack = [v]
            remaining.discard(v)
            while stack:
                u = stack.pop()
                for w in self.neighbors(u):
                    if w in remaining:
                        remaining.discard(w)
                        comp.add(w)
                        stack.append(w)
            comps.append(tuple(x for x in self.vertices if x in comp))
        return comps

    def is_connected(self):
        return len(self.components()) <= 1

    def cut_vertices(self):
        """Vertices whose removal disconnects the graph."""
        if len(self.vertices) <= 2:
            return ()
        base = len(self.components())
        out = []
        for v in self.vertices:
            rest = induced_subgraph(self, [u for u in self.vertices if u != v])
            if len(rest.components()) > base:
                out.append(v)
        return tuple(out)


def induced_subgraph(g: LabeledGraph, vs) -> LabeledGraph:
    """Full subgraph on the vertex set vs, edge labels preserved."""
    keep = set(vs)
    for v in keep:
        if v not in g.vertices:
            raise UnknownVertexError(v)
    verts = tuple(v for v in g.vertices if v in keep)
    edges = {e: m for e, m in g.edges.items() if e[0] in keep and e[1] in keep}
    return LabeledGraph(verts, edges)


def link_and_star(g: LabeledGraph, v):
    """(link, star) of v: full subgraphs on the neighbors, resp. v + neighbors."""
    nbrs = g.neighbors(v)
    link = induced_subgraph(g, nbrs)
    star = induced_subgraph(g, (v,) + nbrs)
    return link, star


def _is_clique(g: LabeledGraph, vs) -> bool:
    return all(g.has_edge(u, v) for u, v in combinations(vs, 2))


def enumerate_clique_separators(g: LabeledGraph, admissible=None):
    """All vertex sets K that induce a complete subgraph, pass `admissible`,
    and whose removal leaves a disconnected graph.

    The empty set qualifies exactly when g itself is disconnected.  Output is
    sorted by size, then lexicographically in vertex order.  Exponential in
    |V|; inputs are capped at SEPARATOR_VERTEX_CAP vertices.
    """
    n = len(g.vertices)
    if n > SEPARATOR_VERTEX_CAP:
        raise DiagramTooLargeError(n, SEPARATOR_VERTEX_CAP)
    if admissible is None:
        admissible = lambda vs: True
    order = {v: i for i, v in enumerate(g.vertices)}
    out = []
    for size in range(n):
        for combo in combinations(g.vertices, size):
            if not _is_clique(g, combo):
                continue
            rest = induced_subgraph(g, [v for v in g.vertices if v not in combo])
            if len(rest.components()) < 2:
                continue
            if not admissible(frozenset(combo)):
                continue
            out.append(tuple(sorted(combo, key=order.__getitem__)))
    return out


@dataclass(frozen=True)
class SimplicialComplex2:
    """A 2-dimensional simplicial complex: vertices, edges, and triangles."""

    vertices: tuple
    edges: frozenset  # frozensets of size 2
    triangles: frozenset  # frozensets of size 3

    @staticmethod
    def build(vertices, edges=(), triangles=()):
        vs = tuple(vertices)
        vset = set(vs)
        es = frozenset(frozenset(e) for e in edges)
        ts = frozenset(frozenset(t) for t in triangles)
        for e in es:
            if len(e) != 2 or not e <= vset:
                raise UnknownVertexError(tuple(e))
        for t in ts:
            if len(t) != 3 or not t <= vset:
                raise UnknownVertexError(tuple(t))
            for pair in combinations(sorted(t, key=vs.index), 2):
                if frozenset(pair) not in es:
                    raise UnknownVertexError(pair)
        return SimplicialComplex2(vs, es, ts)

    def one_skeleton(self) -> LabeledGraph:
        # label value is irrelevant for skeleton computations; use 2
        return LabeledGraph.build(
            self.vertices, [(tuple(sorted(e, key=self.vertices.index)) + (2,)) for e in self.edges]
        )


def is_flag(L: SimplicialComplex2) -> bool:
    """True iff every 3-clique of the 1-skeleton spans a triangle of L."""
    g = L.one_skeleton()
    for trio in combinations(g.vertices, 3):
        if _is_clique(g, trio) and frozenset(trio) not in L.triangles:
            return False
    return True
