"""Exact deciders for Coxeter and Artin diagrams.

Diagrams use the presentation convention: an edge labeled m >= 2 records the
relation (st)^m = 1, a missing edge means the generators are unrelated.
Finite-type recognition converts to the Dynkin convention (label-2 edges
dropped, missing edges become a distinguished infinite label) and pattern
matches components against the classical finite families.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .atoms import EndCount
from .errors import EmptyDiagramError, OrbitBudgetExceededError
from .graphs import LabeledGraph, enumerate_clique_separators, induced_subgraph

DEFAULT_ORBIT_BUDGET = 200_000


@dataclass(frozen=True)
class CoxeterSystem:
    diagram: LabeledGraph

    @property
    def generators(self):
        return self.diagram.vertices

    def m(self, s, t):
        """Order of st: 1 if s == t, the edge label, or inf when unrelated."""
        if s == t:
            return 1
        label = self.diagram.label(s, t)
        return label if label is not None else math.inf


@dataclass(frozen=True)
class FiniteTypeReport:
    is_finite: bool
    component_types: tuple  # of (vertex tuple, family tag string)


# --- Finite-type recognition -------------------------------------------------

def _dynkin_components(sys: CoxeterSystem):
    """Connected components of the diagram in Dynkin convention.

    Dynkin adjacency joins generators with m >= 3 (including m = inf for
    unrelated pairs); commuting pairs (m = 2) are disconnected.
    """
    verts = list(sys.generators)
    adj = {v: [] for v in verts}
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            if sys.m(u, v) >= 3:
                adj[u].append(v)
                adj[v].append(u)
    comps = []
    seen = set()
    for v in verts:
        if v in seen:
            continue
        comp = [v]
        seen.add(v)
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(tuple(x for x in verts if x in set(comp)))
    return comps, adj


def _classify_path(labels):
    """Family tag for a Dynkin path with the given edge-label sequence."""
    n = len(labels) + 1
    big = [m for m in labels if m >= 4]
    if not big:
        return f"A{n}"
    if len(big) > 1:
        return "affine/indefinite"
    m = big[0]
    at_end = labels[0] >= 4 or labels[-1] >= 4
    if m == 4:
        if at_end:
            return f"B{n}"
        if n == 4 and labels[1] == 4:
            return "F4"
        return "affine/indefinite"
    if m == 5 and at_end:
        if n == 2:
            return "I2(5)"
        if n == 3:
            return "H3"
        if n == 4:
            return "H4"
        return "affine/indefinite"
    if n == 2:
        return f"I2({m})"
    return "affine/indefinite"


def _classify_component(sys: CoxeterSystem, comp, adj):
    if len(comp) == 1:
        return "A1"
    # any unrelated pair inside a Dynkin component makes it infinite
    for i, u in enumerate(comp):
        for v in comp[i + 1:]:
            if sys.m(u, v) == math.inf:
                return "affine/indefinite"
    degs = {v: len([w for w in adj[v] if w in set(comp)]) for v in comp}
    edge_count = sum(degs.values()) // 2
    if edge_count >= len(comp):  # contains a cycle
        return "affine/indefinite"
    branch = [v for v in comp if degs[v] >= 3]
    if any(degs[v] >= 4 for v in comp) or len(branch) > 1:
        return "affine/indefinite"
    if not branch:
        # a path; walk it from one end
        ends = [v for v in comp if degs[v] == 1]
        start = ends[0]
        order = [start]
        prev = None
        while len(order) < len(comp):
            nxt = [w for w in adj[order[-1]] if w in set(comp) and w != prev][0]
            prev = order[-1]
            order.append(nxt)
        labels = [int(sys.m(order[i], order[i + 1])) for i in range(len(order) - 1)]
        tag = _classify_path(labels)
        rev = _classify_path(labels[::-1])
        # orientation must not matter; both walks classify identically
        assert tag == rev
        return tag
    # one degree-3 branch vertex: D/E shapes, simply laced only
    for i, u in enumerate(comp):
        for v in comp[i + 1:]:
            m = sys.m(u, v)
            if m != math.inf and m not in (1, 2, 3):
                return "affine/indefinite"
    b = branch[0]
    lengths = []
    for start in adj[b]:
        if start not in set(comp):
            continue
        length = 1
        prev, cur = b, start
        while True:
            nxt = [w for w in adj[cur] if w in set(comp) and w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        lengths.append(length)
    lengths.sort()
    n = len(comp)
    if lengths[:2] == [1, 1]:
        return f"D{n}"
    if lengths == [1, 2, 2]:
        return "E6"
    if lengths == [1, 2, 3]:
        return "E7"
    if lengths == [1, 2, 4]:
        return "E8"
    return "affine/indefinite"


def is_finite_type(sys: CoxeterSystem) -> FiniteTypeReport:
    comps, adj = _dynkin_components(sys)
    types = []
    finite = True
    for comp in comps:
        tag = _classify_component(sys, comp, adj)
        if tag == "affine/indefinite":
            finite = False
        types.append((comp, tag))
    return FiniteTypeReport(finite, tuple(types))


# --- End counting ------------------------------------------------------------

@dataclass(frozen=True)
class CoxeterEndsReport:
    ends: EndCount
    witness: dict


def coxeter_ends(sys: CoxeterSystem) -> CoxeterEndsReport:
    """Number of ends of the Coxeter group on the presentation diagram.

    Zero iff the system is finite type.  Multi-ended iff the diagram has a
    complete separating subgraph generating a finite subgroup; among the
    multi-ended, 2-ended iff the diagram decomposes as two unrelated
    vertices each commuting with a finite-type remainder.
    """
    diagram = sys.diagram
    report = is_finite_type(sys)
    if report.is_finite:
        return CoxeterEndsReport(
            EndCount.ZERO, {"kind": "finite_type", "components": report.component_types}
        )

    def admissible(vs):
        return is_finite_type(CoxeterSystem(induced_subgraph(diagram, vs))).is_finite

    separators = enumerate_clique_separators(diagram, admissible)
    if not separators:
        return CoxeterEndsReport(EndCount.ONE, {"kind": "no_admissible_separator"})

    two = _match_two_ended(sys)
    if two is not None:
        lambda0, pair = two
        return CoxeterEndsReport(
            EndCount.TWO, {"kind": "two_ended_decomposition", "lambda0": lambda0, "pair": pair}
        )
    return CoxeterEndsReport(
        EndCount.INFINITE, {"kind": "separator", "separator": separators[0]}
    )


def _match_two_ended(sys: CoxeterSystem):
    """Find Lambda0 with finite-type span whose complement is a non-adjacent
    pair, each joined to all of Lambda0 by label-2 edges."""
    diagram = sys.diagram
    verts = diagram.vertices
    if len(verts) < 2:
        return None
    order = {v: i for i, v in enumerate(verts)}
    candidates = []
    for i, x in enumerate(verts):
        for y in verts[i + 1:]:
            if diagram.has_edge(x, y):
                continue
            lambda0 = tuple(v for v in verts if v not in (x, y))
            if not all(diagram.label(v, z) == 2 for v in (x, y) for z in lambda0):
                continue
            if not is_finite_type(CoxeterSystem(induced_subgraph(diagram, lambda0))).is_finite:
                continue
            candidates.append((lambda0, (x, y)))
    if not candidates:
        return None
    candidates.sort(key=lambda c: (len(c[0]), [order[v] for v in c[0]]))
    return candidates[0]


# --- Artin diagrams -----------------------------------------------------------

@dataclass(frozen=True)
class ArtinEndsReport:
    one_ended: bool
    ends: EndCount | None


def artin_one_ended(diagram: LabeledGraph) -> ArtinEndsReport:
    """Connected Artin diagram with >= 2 vertices gives a 1-ended group.

    One vertex is Z (2-ended); a disconnected diagram is a free product of
    infinite groups (infinitely many ends).
    """
    if not diagram.vertices:
        raise EmptyDiagramError("Artin diagram must be nonempty")
    if len(diagram.vertices) == 1:
        return ArtinEndsReport(False, EndCount.TWO)
    if not diagram.is_connected():
        return ArtinEndsReport(False, EndCount.INFINITE)
    return ArtinEndsReport(True, EndCount.ONE)


# --- Tits-style word problem ---------------------------------------------------

def _braid_orbit(word, sys: CoxeterSystem, budget):
    """All words reachable from `word` by braid moves (bounded BFS)."""
    seen = {word}
    queue = deque([word])
    while queue:
        w = queue.popleft()
        n = len(w)
        for i in range(n - 1):
            s, t = w[i], w[i + 1]
            if s == t:
                continue
            m = sys.m(s, t)
            if m == math.inf or i + m > n:
                continue
            m = int(m)
            expected = tuple(s if k % 2 == 0 else t for k in range(m))
            if w[i:i + m] != expected:
                continue
            flipped = tuple(t if k % 2 == 0 else s for k in range(m))
            u = w[:i] + flipped + w[i + m:]
            if u not in seen:
                if len(seen) >= budget:
                    raise OrbitBudgetExceededError(budget)
                seen.add(u)
                queue.append(u)
    return seen


def tits_normal_form(word, sys: CoxeterSystem, budget=DEFAULT_ORBIT_BUDGET):
    """ShortLex-least reduced word for the element `word` represents.

    Repeatedly searches the braid orbit for a square ss, deletes it, and
    restarts; when no orbit word contains a square the word is reduced and
    the lexicographically least orbit member (in generator order) is the
    canonical form.
    """
    gens = sys.generators
    index = {g: i for i, g in enumerate(gens)}
    for letter in word:
        if letter not in index:
            raise KeyError(f"unknown generator {letter!r}")
    w = tuple(word)
    while True:
        orbit = _braid_orbit(w, sys, budget)
        shorter = None
        for u in orbit:
            for i in range(len(u) - 1):
                if u[i] == u[i + 1]:
                    shorter = u[:i] + u[i + 2:]
                    break
            if shorter is not None:
                break
        if shorter is None:
            if not orbit:
                return ()
            return min(orbit, key=lambda u: [index[c] for c in u])
        w = shorter


def enumerate_elements(sys: CoxeterSystem, cap=10_000, budget=DEFAULT_ORBIT_BUDGET):
    """Canonical forms of all group elements, or None if `cap` is exceeded."""
    identity = ()
    seen = {identity}
    queue = deque([identity])
    while queue:
        w = queue.popleft()
        for s in sys.generators:
            u = tits_normal_form(w + (s,), sys, budget)
            if u not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(u)
                queue.append(u)
    return seen


# --- Exact reflection representation (integral for labels in {2, 3, inf}) -----

INTEGRAL_LABELS = {2, 3}


def has_integral_representation(sys: CoxeterSystem) -> bool:
    """True when 2*cos(pi/m) is an integer for every edge label.

    That holds for m in {2, 3} and for unrelated pairs (m = inf), making the
    Tits reflection representation an exact integer-matrix model.
    """
    return all(m in INTEGRAL_LABELS for m in sys.diagram.edges.values())


def _two_cos(m):
    if m == 2:
        return 0
    if m == 3:
        return 1
    if m == math.inf:
        return 2
    raise ValueError(f"label {m} has no integral 2cos(pi/m)")


def tits_generator_matrices(sys: CoxeterSystem):
    """Integer matrices of the Tits representation, one per generator.

    Only valid when has_integral_representation(sys).  The representation is
    faithful, so matrix equality decides the word problem exactly.
    """
    gens = sys.generators
    n = len(gens)
    mats = []
    for i, s in enumerate(gens):
        rows = []
        for k in range(n):
            if k != i:
                rows.append(tuple(1 if j == k else 0 for j in range(n)))
            else:
                row = []
                for j, t in enumerate(gens):
                    row.append(-1 if j == i else _two_cos(sys.m(s, t)))
                rows.append(tuple(row))
        mats.append(tuple(rows))
    return tuple(mats)


def mat_mul(a, b):
    n = len(a)
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(ra[k] * cb[k] for k in range(n)) for cb in bt) for ra in a
    )


def identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
