"""Forward-chaining inference over group-property atoms.

Facts are (group, atom, polarity) triples.  Rules encode theorems, each with
a citation tag and a verbatim quote; derived facts carry replayable
certificate trees whose leaves are user assertions, database facts, or
structural facts read off a group's constructor.  Deriving both polarities of
the same atom raises ContradictionError with both certificates attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .atoms import ENDS_ATOMS, EndCount, PropertyAtom
from .coxeter import CoxeterSystem, artin_one_ended, coxeter_ends, is_finite_type
from .errors import (
    ContradictionError,
    DisconnectedGraphError,
    FactNotDerivedError,
    UnknownProfileError,
)
from .graph_products import (
    GraphProductSpec,
    VertexProfile,
    graph_product_ends,
    graph_product_semistable,
)
from .model import (
    Amalgam,
    Artin,
    AttributeAssertion,
    CommensuratedPair,
    Coxeter,
    DirectProduct,
    Extension,
    Finite,
    Free,
    FreeAbelian,
    GraphProduct,
    GroupRegistry,
    HNN,
    Known,
)

A = PropertyAtom

ENDS_GROUP = (A.ENDS_ZERO, A.ENDS_ONE, A.ENDS_TWO, A.ENDS_INFINITE)


@dataclass(frozen=True)
class Certificate:
    """One derived or asserted fact plus how it was obtained."""

    group: str
    atom: PropertyAtom
    holds: bool
    rule: str | None = None  # None for leaves
    tag: str | None = None
    quote: str | None = None
    provenance: str | None = None  # leaf origin or structural-hypothesis note
    children: tuple = ()

    def fact(self):
        return (self.group, self.atom, self.holds)

    def is_leaf(self):
        return self.rule is None


class FactSet:
    """Derived facts keyed by (group, atom, polarity), each with a certificate."""

    def __init__(self):
        self._certs = {}

    def get(self, group, atom, holds=True):
        return self._certs.get((group, atom, holds))

    def has(self, group, atom, holds=True):
        return (group, atom, holds) in self._certs

    def add(self, cert: Certificate) -> bool:
        key = cert.fact()
        if key in self._certs:
            return False
        opposite = (cert.group, cert.atom, not cert.holds)
        if opposite in self._certs:
            other = self._certs[opposite]
            pos, neg = (cert, other) if cert.holds else (other, cert)
            raise ContradictionError(cert.group, cert.atom, pos, neg)
        self._certs[key] = cert
        return True

    def facts(self):
        return list(self._certs)

    def certificates(self):
        return list(self._certs.values())

    def by_group(self, group):
        return {
            (atom, holds): c
            for (g, atom, holds), c in self._certs.items()
            if g == group
        }

    def __len__(self):
        return len(self._certs)

    def __iter__(self):
        return iter(self._certs)


@dataclass(frozen=True)
class Rule:
    name: str
    tag: str
    quote: str
    premises: tuple
    conclusions: tuple
    fire: object = field(compare=False)  # (registry, facts, name, expr) -> certs

    def conclude(self, group, atom, holds, children, note=None):
        return Certificate(
            group, atom, holds,
            rule=self.name, tag=self.tag, quote=self.quote,
            provenance=note, children=tuple(children),
        )


def _gather(facts, group, wanted):
    """Certificates for all (atom, holds) pairs, or None if any is missing."""
    out = []
    for atom, holds in wanted:
        c = facts.get(group, atom, holds)
        if c is None:
            return None
        out.append(c)
    return out


def _any_of(facts, group, options):
    for atom, holds in options:
        c = facts.get(group, atom, holds)
        if c is not None:
            return c
    return None


def _prop_rule(name, tag, quote, premises, conclusions):
    """Rule whose premises and conclusions all live on the target group."""
    rule_box = []

    def fire(registry, facts, gname, expr):
        children = _gather(facts, gname, premises)
        if children is None:
            return
        rule = rule_box[0]
        for atom, holds in conclusions:
            yield rule.conclude(gname, atom, holds, children)

    rule = Rule(
        name, tag, quote,
        tuple(f"{'' if h else 'not '}{a.value}" for a, h in premises),
        tuple(f"{'' if h else 'not '}{a.value}" for a, h in conclusions),
        fire,
    )
    rule_box.append(rule)
    return rule


# --- Quotes (verbatim from the sources the rules encode) ---------------------

_Q = {
    "Stall": "The finitely generated group $G$ has more than 1-end if and only"
             " if $G$ splits as a non-trivial amalgamated product $A\\ast_CB$"
             " (so $A\\ne C\\ne B$) or an HNN-extension $A\\ast_C$ where $C$ is finite.",
    "M1": "If $H$ is an infinite, finitely generated, normal subgroup of"
          " infinite index in the finitely presented group $G$, then $G$ is"
          " semistable at $\\infty$.",
    "J": "If $H$ is an infinite, finitely presented, normal subgroup of"
         " infinite index in the finitely presented group $G$, and either $H$"
         " or $G/H$ is 1-ended. Then $G$ is simply connected at $\\infty$.",
    "MainCM": "If a finitely generated group $G$ has an infinite, finitely"
              " generated, commensurated subgroup $Q$, and $Q$ has infinite"
              " index in $G$, then $G$ is 1-ended and semistable at $\\infty$.",
    "L": "Suppose $H$ is an infinite,  finitely generated, subnormal subgroup"
         " of the finitely generated group $G$ ... and $H$ has infinite index"
         " in $G$. Then $G$ is 1-ended and semistable at $\\infty$.",
    "MainA": "Suppose $H$ is a finitely generated infinite subgroup of"
             " infinite index in the finitely generated group $G$, and  $H$ is"
             " subcommensurated in $G$ ... Then $G$ is 1-ended and semistable"
             " at infinity.",
    "MM": "Suppose $H$ is an infinite finitely presented group, $\\phi:H\\to H$"
          " is a monomorphism and $G=H\\ast_\\phi$ is the resulting ascending"
          " HNN extension. Then $G$ is 1-ended and semistable at $\\infty$. If"
          " additionally, $H$ is 1-ended, then $G$ is simply connected at $\\infty$.",
    "MMFIE": "Suppose $H_0$ is an infinite finitely generated group, $H_1$ is"
             " a subgroup of finite index in $H_0$, $\\phi:H_1\\to H_0$ is a"
             " monomorphism and $G=H_0\\ast_\\phi$ is the resulting HNN"
             " extension. Then $G$ is 1-ended.",
    "MTComb": "If $G$ is the fundamental group of a finite graph of groups"
              " where each vertex group is finitely presented with semistable"
              " fundamental group at $\\infty$, and each edge group is finitely"
              " generated, then $G$ has semistable fundamental group at $\\infty$.",
    "Fsplit": "Suppose the group $G$ has a graph of groups decomposition"
              " $\\mathcal G$ where each edge group is finite and each vertex"
              " group is finitely presented. The group $G$ has semistable"
              " fundamental group at $\\infty$  if and only if each vertex group"
              " of $\\mathcal G$ has semistable fundamental group at infinity.",
    "SSDecomp": "Suppose $G$ is the fundamental group of a connected reduced"
                " graph of groups, where each edge group is infinite and"
                " finitely generated, and each vertex group is finitely"
                " presented and either 1-ended and semistable at $\\infty$ or"
                " has an edge group of finite index. Then $G$ is 1-ended and"
                " semistable at $\\infty$.",
    "FIss": "Suppose $G$ is the amalgamated product $A\\ast_CB$ where $A$ and"
            " $B$ are finitely generated and $C$ has finite index in $A$ and"
            " $B$ (but $A\\ne C\\ne B$). Then $G$ is 1-ended and semistable at"
            " $\\infty$.",
    "OneR": "All 1-relator groups are semistable at $\\infty$.",
    "WHss": "All word hyperbolic groups are semistable at $\\infty$.",
    "metanil": "All finitely presented virtually metanilpotent groups are"
               " semistable at $\\infty$.",
    "NOF2": "Suppose $G$ is a finitely presented group which does not contain"
            " a free subgroup of rank 2, and suppose $\\mathbb Z\\oplus \\mathbb Z$"
            " is a quotient of $G$. Then $G$ is 1-ended and has semistable"
            " fundamental group at $\\infty$.",
    "HMSSMain": "Suppose $G$ is a  finitely presented group that is hyperbolic"
                " relative to a collection of finitely generated subgroups"
                " ${\\bf P}=\\{P_1,\\ldots, P_n\\}$. If each $P_i$ has semistable"
                " fundamental group at $\\infty$ then $G$ has semistable"
                " fundamental group at $\\infty$.",
    "combE": "Suppose $G$ is a finitely generated group, $A$ and $B$ are"
             " finitely generated 1 or 2-ended subgroups of $G$, $A\\cup B$"
             " generates $G$ and $A\\cap B$ is infinite. Then $G$ is 1 or 2-ended.",
    "GM2": "The group $H^2(G,\\mathbb ZG)$ is free abelian if and only if"
           " $ H_1(\\varepsilon\\tilde X^2)$ is semistable.",
    "GM2sc": "Corollary \\ref{GM2} implies that if a finitely presented group"
             " $G$ is simply connected at $\\infty$, then $H^2(G,\\mathbb ZG)=0$.",
    "Reduction": "The group $H^2(G,\\mathbb ZG)$ is isomorphic to the direct"
                 " sum $\\oplus_{i=1}^nA_i$, where $A_i$ is isomorphic to"
                 " $\\oplus _{[H_i:G]}H^2(H_i,\\mathbb ZH_i)$.",
    "JHom": "Suppose $G=G_1\\ast_SG_2$ or $G=G_1\\ast_S$ where $G_i$ is"
            " finitely presented and 1-ended and $S$ is finitely generated with"
            " more than 1 end. Then $H^2(G, \\mathbb ZG)$ is non-trivial.",
    "SCtoSS": "If $X$ is simply connected at $\\infty$ then $X$ is semistable"
              " at $\\infty$.",
    "stablepro": "Suppose $G$ is a finitely presented group and"
                 " $\\pi_1(\\varepsilon G)$, the fundamental pro-group of $G$,"
                 " is stable. Then either $G$ is simply connected at $\\infty$"
                 " or $G$ is virtually a closed surface group and"
                 " $\\pi_1(\\varepsilon G)$ is pro-isomorphic to an inverse"
                 " sequence where each group is $\\mathbb Z$ and each bonding"
                 " map is an isomorphism.",
    "free": "Every finitely generated infinite ended group contains a free"
            " group on 2-generators. So every solvable group is either finite,"
            " 1-ended or 2-ended.",
    "JackI": "Suppose $G=G_1\\ast_HG_2$ where $G_1$ and $G_2$ are finitely"
             " presented and 1-ended and $H$ is finitely generated with more"
             " than 1-end, then $G$ has 1-end but is not stable at $\\infty$.",
    "JackIi": "Suppose $G=G_1\\ast_HG_2$ where $G_1$ and $G_2$ are finitely"
              " presented 1-ended and simply connected at $\\infty$ and $H$ is"
              " finitely generated and 1-ended. Then $G$ is simply connected"
              " at $\\infty$.",
    "JackII": "Suppose $G$ is the HNN group $G_1 \\ast _{f:H\\to K}$ where"
              " $G_1$ is finitely presented and 1-ended and $H$ is finitely"
              " generated with more than 1-end, then $G$ is 1-ended, but is"
              " not stable at $\\infty$.",
    "JackIIi": "Suppose $G$ is the HNN group $G_1 \\ast _{f:H\\to K}$ where"
               " $G_1$ is finitely presented, 1-ended and simply connected at"
               " $\\infty$. If $H$ is finitely generated and 1-ended, then $G$"
               " is 1-ended and simply connected at $\\infty$",
    "sc": "Suppose the recursively presented group $G$ is finitely generated"
          " and isomorphic to $A\\times B$ where $A$ and $B$ are finitely"
          " generated infinite groups and $A$ is 1-ended. Then $G$ is simply"
          " connected at $\\infty$.",
    "E3inf": "Then $X$ has $0$, $1$, $2$ or infinitely many ends.",
    "CoxE": "Suppose $W$ is  a finitely generated Coxeter group with"
            " presentation diagram $\\Lambda$. Then $W$ has more than one end"
            " if and only if $\\Lambda$ contains a complete separating"
            " subgraph, the vertices of which generate a finite subgroup of $W$.",
    "Cox2E": "A finitely generated Coxeter group with system $(W,S)$ and"
             " corresponding diagram $\\Lambda$ is 2-ended if and only if"
             " $\\Lambda$ contains a separating subdiagram $\\Lambda_0$ whose"
             " vertices generate a finite group, and $\\Lambda-\\Lambda_0$"
             " consists of two vertices each of which is connected to each"
             " vertex of $\\Lambda_0$ by edges labeled 2 (but not connected to"
             " each other).",
    "ArtinE": "If $G$ is an Artin group on a connected Artin diagram with at"
              " least 2 vertices, then $G$ is 1-ended.",
    "ACSS": "All finitely generated Artin groups and Coxeter groups are"
            " semistable at $\\infty$.",
    "OV": "(i) $\\Gamma$ is a complete graph such that one vertex group has"
          " more than one end and all others are finite, or (ii) $G$ visually"
          " splits over a finite group.",
    "GraphP": "Then $G$ does not have semistable fundamental group at $\\infty$"
              " if and only if there is a vertex $v$ of $\\Lambda$ such that:"
              " (1) $G_v$ does not have semistable fundamental group at"
              " $\\infty$ and (2) the link of $v$ is a complete graph with each"
              " vertex group finite.",
    "LNss": "The lamplighter group is not semistable at $\\infty$.",
    "ExLsc": "The extended lamplighter group ... is simply connected at $\\infty$.",
    "TGF": "Theorem \\ref{MM} implies $F$ is simply connected at $\\infty$",
    "SLn": "For $n>2$, the group $SL_n(\\mathbb Z[{1\\over p}])$ is 1-ended and"
           " simply connected at $\\infty$.",
    "DavisEx": "Hence, when $G$ is the fundamental group of such a manifold,"
               " $G$ is not simply connected at $\\infty$. ... This implies"
               " $H^2(G,\\mathbb ZG)=0$.",
    "scGrig": "Theorem \\ref{sc} implies the finitely generated group $G$ is"
              " simply connected at $\\infty$.",
    "SDSSI": "If $G$ is an infinite finitely generated group then"
             " $\\mathfrak{X}(G)$ is 1-ended and semistable at infinity.",
    "BSmn": "The Baumslag-Solitar groups $BS(m,n)=\\langle x,t  \\ |\\ "
            " t^{-1} x^mt=x^n\\rangle$ are 1-ended and semistable at $\\infty$.",
}


# --- Known-groups database ----------------------------------------------------

def known_groups_db():
    """Seeded facts about catalog groups: name -> ((atom, holds, tag), ...)."""
    return {
        "lamplighter": (
            (A.SEMISTABLE, False, "LNss"),
            (A.FG, True, "LNss"),
            (A.FP, False, "LNss"),
            (A.INFINITE, True, "LNss"),
        ),
        "extended_lamplighter": (
            (A.SC_INF, True, "ExLsc"),
            (A.FP, True, "ExLsc"),
            (A.INFINITE, True, "ExLsc"),
        ),
        "thompson_F": (
            (A.SC_INF, True, "TGF"),
            (A.FP, True, "TGF"),
            (A.FG, True, "TGF"),
            (A.INFINITE, True, "TGF"),
        ),
        "SLn_Z_1_over_p": (
            (A.SC_INF, True, "SLn"),
            (A.ENDS_ONE, True, "SLn"),
            (A.FP, True, "SLn"),
            (A.INFINITE, True, "SLn"),
        ),
        "davis_examples": (
            (A.SC_INF, False, "DavisEx"),
            (A.H2_TRIVIAL, True, "DavisEx"),
            (A.FP, True, "DavisEx"),
            (A.INFINITE, True, "DavisEx"),
        ),
        "grigorchuk": (
            (A.SC_INF, True, "scGrig"),
            (A.FG, True, "scGrig"),
            (A.FP, False, "scGrig"),
            (A.INFINITE, True, "scGrig"),
        ),
        "sidki_double_F3": (
            (A.ENDS_ONE, True, "SDSSI"),
            (A.SEMISTABLE, True, "SDSSI"),
            (A.FG, True, "SDSSI"),
            (A.INFINITE, True, "SDSSI"),
        ),
    }


# --- Structural facts from constructors ---------------------------------------

def _leaf(group, atom, holds, provenance):
    return Certificate(group, atom, holds, provenance=provenance)


def structural_facts(registry: GroupRegistry):
    """Facts that follow directly from a group's constructor."""
    db = known_groups_db()
    out = []
    for name, expr in registry.groups.items():
        if isinstance(expr, Finite):
            why = f"structural: finite of order {expr.order}"
            out += [
                _leaf(name, A.FINITE, True, why),
                _leaf(name, A.FG, True, why),
                _leaf(name, A.FP, True, why),
                _leaf(name, A.SEMISTABLE, True, why),
                _leaf(name, A.SC_INF, True, why),
            ]
        elif isinstance(expr, (Free, FreeAbelian)):
            flavor = "free" if isinstance(expr, Free) else "free abelian"
            why = f"structural: {flavor} of rank {expr.rank}"
            out += [_leaf(name, A.FG, True, why), _leaf(name, A.FP, True, why)]
            if expr.rank == 0:
                out += [
                    _leaf(name, A.FINITE, True, why),
                    _leaf(name, A.SEMISTABLE, True, why),
                ]
            elif expr.rank == 1:
                out += [
                    _leaf(name, A.INFINITE, True, why),
                    _leaf(name, A.ENDS_TWO, True, why),
                    _leaf(name, A.SOLVABLE, True, why),
                    _leaf(name, A.NO_F2_SUBGROUP, True, why),
                ]
            elif isinstance(expr, Free):
                out += [
                    _leaf(name, A.INFINITE, True, why),
                    _leaf(name, A.ENDS_INFINITE, True, why),
                    _leaf(name, A.WORD_HYPERBOLIC, True, why),
                ]
            else:
                out += [
                    _leaf(name, A.INFINITE, True, why),
                    _leaf(name, A.SOLVABLE, True, why),
                    _leaf(name, A.NO_F2_SUBGROUP, True, why),
                    _leaf(name, A.HAS_ZXZ_QUOTIENT, True, why),
                ]
        elif isinstance(expr, (Coxeter, Artin)):
            why = "structural: finite presentation diagram"
            out += [_leaf(name, A.FG, True, why), _leaf(name, A.FP, True, why)]
        elif isinstance(expr, Known):
            for atom, holds, tag in db.get(expr.name, ()):
                out.append(
                    Certificate(
                        name, atom, holds,
                        provenance=f"database: {expr.name} [{tag}] {_Q[tag]}",
                    )
                )
    return out


# --- Rule table -----------------------------------------------------------------

def _ends_cert(facts, group):
    for atom in ENDS_GROUP:
        c = facts.get(group, atom, True)
        if c is not None:
            return atom, c
    return None, None


def builtin_rules():
    rules = []

    # Propositional rules on the target group.
    rules.append(_prop_rule(
        "R-1REL", "OneR", _Q["OneR"],
        [(A.ONE_RELATOR, True)], [(A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-HYP", "WHss", _Q["WHss"],
        [(A.WORD_HYPERBOLIC, True)], [(A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-METANIL", "metanil", _Q["metanil"],
        [(A.VIRTUALLY_METANILPOTENT, True), (A.FP, True)],
        [(A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-NOF2", "NOF2", _Q["NOF2"],
        [(A.FP, True), (A.NO_F2_SUBGROUP, True), (A.HAS_ZXZ_QUOTIENT, True)],
        [(A.ENDS_ONE, True), (A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-RELHYP", "HMSSMain", _Q["HMSSMain"],
        [(A.FP, True), (A.REL_HYP_WITH_SEMISTABLE_PERIPHERALS, True)],
        [(A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-SC2SS", "SCtoSS", _Q["SCtoSS"],
        [(A.SC_INF, True)], [(A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-GM2", "GM2", _Q["GM2"],
        [(A.SEMISTABLE, True), (A.FP, True)],
        [(A.H1_EPS_SEMISTABLE, True), (A.H2_FREE_ABELIAN, True)],
    ))
    rules.append(_prop_rule(
        "R-GM2-SC", "GM2", _Q["GM2sc"],
        [(A.SC_INF, True), (A.FP, True)], [(A.H2_TRIVIAL, True)],
    ))
    rules.append(_prop_rule(
        "R-BOWDITCH", "stablepro", _Q["stablepro"],
        [(A.PRO_GROUP_STABLE, True), (A.FP, True)], [(A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-SCFREE", "free", _Q["free"],
        [(A.FG, True), (A.NO_F2_SUBGROUP, True)],
        [(A.ENDS_INFINITE, False)],
    ))
    rules.append(_prop_rule(
        "R-SOLV", "free", _Q["free"],
        [(A.SOLVABLE, True)], [(A.NO_F2_SUBGROUP, True)],
    ))
    rules.append(_prop_rule(
        "R-SUBNORM", "L", _Q["L"],
        [(A.FG, True), (A.SUBNORMAL_CHAIN_WITNESS, True)],
        [(A.ENDS_ONE, True), (A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-SUBCOMM", "MainA", _Q["MainA"],
        [(A.FG, True), (A.SUBCOMMENSURATED_CHAIN_WITNESS, True)],
        [(A.ENDS_ONE, True), (A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-AHNN-ATOM", "MM", _Q["MM"],
        [(A.ASCENDING_HNN_OF_INF_FP_BASE, True)],
        [(A.ENDS_ONE, True), (A.SEMISTABLE, True)],
    ))
    rules.append(_prop_rule(
        "R-AHNN-ATOM-SC", "MM", _Q["MM"],
        [(A.ASCENDING_HNN_OF_INF_FP_BASE, True),
         (A.ASCENDING_HNN_BASE_ONE_ENDED, True)],
        [(A.SC_INF, True)],
    ))

    # Bookkeeping rules with citations to the end-count trichotomy.
    def fire_ends_excl(registry, facts, gname, expr):
        atom, cert = _ends_cert(facts, gname)
        if cert is None:
            return
        rule = _BY_NAME["R-ENDS-EXCL"]
        for other in ENDS_GROUP:
            if other is not atom:
                yield rule.conclude(gname, other, False, [cert])

    rules.append(Rule(
        "R-ENDS-EXCL", "E3inf", _Q["E3inf"],
        ("ends_k",), ("not ends_j for j != k",), fire_ends_excl,
    ))

    def fire_finiteness(registry, facts, gname, expr):
        rule = _BY_NAME["R-FIN"]
        c = facts.get(gname, A.FINITE, True)
        if c is not None:
            yield rule.conclude(gname, A.ENDS_ZERO, True, [c])
            yield rule.conclude(gname, A.INFINITE, False, [c])
        c = facts.get(gname, A.ENDS_ZERO, True)
        if c is not None:
            yield rule.conclude(gname, A.FINITE, True, [c])
        c = facts.get(gname, A.INFINITE, True)
        if c is not None:
            yield rule.conclude(gname, A.FINITE, False, [c])
            yield rule.conclude(gname, A.ENDS_ZERO, False, [c])
        for atom in (A.ENDS_ONE, A.ENDS_TWO, A.ENDS_INFINITE):
            c = facts.get(gname, atom, True)
            if c is not None:
                yield rule.conclude(gname, A.INFINITE, True, [c])

    rules.append(Rule(
        "R-FIN", "E3inf", _Q["E3inf"],
        ("finite or an end count",), ("finiteness / ends_zero consistency",),
        fire_finiteness,
    ))

    # Structure-driven rules.
    def fire_stallings(registry, facts, gname, expr):
        if not (isinstance(expr, Amalgam) and expr.edge_finite):
            return
        rule = _BY_NAME["R-STALLINGS"]
        note = "constructor: non-trivial amalgam with finite edge group"
        yield rule.conclude(gname, A.ENDS_ZERO, False, [], note)
        yield rule.conclude(gname, A.ENDS_ONE, False, [], note)

    rules.append(Rule(
        "R-STALLINGS", "Stall", _Q["Stall"],
        ("amalgam over a finite edge group",), ("more than one end",),
        fire_stallings,
    ))

    def fire_fi_amalg(registry, facts, gname, expr):
        if not (isinstance(expr, Amalgam) and expr.c_index_finite_in_both):
            return
        children = []
        for part in (expr.a, expr.b):
            got = _gather(facts, part, [(A.FG, True)])
            if got is None:
                return
            children += got
        rule = _BY_NAME["R-FI-AMALG"]
        note = "constructor: edge group of finite index in both factors"
        yield rule.conclude(gname, A.ENDS_ONE, True, children, note)
        yield rule.conclude(gname, A.SEMISTABLE, True, children, note)

    rules.append(Rule(
        "R-FI-AMALG", "FIss", _Q["FIss"],
        ("factors finitely generated", "edge group of finite index in both"),
        ("ends_one", "semistable"), fire_fi_amalg,
    ))

    def fire_combe(registry, facts, gname, expr):
        if not isinstance(expr, Amalgam):
            return
        children = []
        for part in (expr.a, expr.b):
            fg = facts.get(part, A.FG, True)
            low = _any_of(facts, part, [(A.ENDS_ONE, True), (A.ENDS_TWO, True)])
            if fg is None or low is None:
                return
            children += [fg, low]
        edge = _gather(facts, expr.c, [(A.INFINITE, True), (A.FG, True)])
        if edge is None:
            return
        children += edge
        rule = _BY_NAME["R-COMBE"]
        yield rule.conclude(gname, A.ENDS_ZERO, False, children)
        yield rule.conclude(gname, A.ENDS_INFINITE, False, children)

    rules.append(Rule(
        "R-COMBE", "combE", _Q["combE"],
        ("factors finitely generated and 1 or 2-ended",
         "edge group infinite"),
        ("not ends_zero", "not ends_infinite"), fire_combe,
    ))

    def fire_gog_ss(registry, facts, gname, expr):
        if not isinstance(expr, Amalgam):
            return
        children = []
        for part in (expr.a, expr.b):
            got = _gather(facts, part, [(A.FP, True), (A.SEMISTABLE, True)])
            if got is None:
                return
            children += got
        edge = facts.get(expr.c, A.FG, True)
        if edge is None:
            return
        children.append(edge)
        rule = _BY_NAME["R-GOG-SS"]
        yield rule.conclude(gname, A.SEMISTABLE, True, children)

    rules.append(Rule(
        "R-GOG-SS", "MTComb", _Q["MTComb"],
        ("vertex groups finitely presented and semistable",
         "edge group finitely generated"),
        ("semistable",), fire_gog_ss,
    ))

    def fire_gog_fin(registry, facts, gname, expr):
        if not (isinstance(expr, Amalgam) and expr.edge_finite):
            return
        rule = _BY_NAME["R-GOG-FIN"]
        fp = [facts.get(p, A.FP, True) for p in (expr.a, expr.b)]
        if None in fp:
            return
        pos = [facts.get(p, A.SEMISTABLE, True) for p in (expr.a, expr.b)]
        if None not in pos:
            yield rule.conclude(gname, A.SEMISTABLE, True, fp + pos)
        for part in (expr.a, expr.b):
            neg = facts.get(part, A.SEMISTABLE, False)
            if neg is not None:
                yield rule.conclude(gname, A.SEMISTABLE, False, fp + [neg])

    rules.append(Rule(
        "R-GOG-FIN", "Fsplit", _Q["Fsplit"],
        ("finite edge group", "vertex groups finitely presented"),
        ("semistable iff both vertex groups semistable",), fire_gog_fin,
    ))

    def fire_gog_dec(registry, facts, gname, expr):
        if not (isinstance(expr, Amalgam) and expr.reduced):
            return
        edge = _gather(facts, expr.c, [(A.INFINITE, True), (A.FG, True)])
        if edge is None:
            return
        children = list(edge)
        for part in (expr.a, expr.b):
            got = _gather(
                facts, part,
                [(A.FP, True), (A.ENDS_ONE, True), (A.SEMISTABLE, True)],
            )
            if got is None:
                return
            children += got
        rule = _BY_NAME["R-GOG-DEC"]
        note = "constructor: reduced graph of groups"
        yield rule.conclude(gname, A.ENDS_ONE, True, children, note)
        yield rule.conclude(gname, A.SEMISTABLE, True, children, note)

    rules.append(Rule(
        "R-GOG-DEC", "SSDecomp", _Q["SSDecomp"],
        ("reduced", "edge group infinite and finitely generated",
         "vertex groups finitely presented, 1-ended, semistable"),
        ("ends_one", "semistable"), fire_gog_dec,
    ))

    def fire_jacki(registry, facts, gname, expr):
        if not isinstance(expr, Amalgam):
            return
        children = []
        for part in (expr.a, expr.b):
            got = _gather(facts, part, [(A.FP, True), (A.ENDS_ONE, True)])
            if got is None:
                return
            children += got
        edge = _gather(facts, expr.c, [(A.FG, True), (A.ENDS_INFINITE, True)])
        if edge is None:
            return
        children += edge
        rule = _BY_NAME["R-JACKI"]
        yield rule.conclude(gname, A.ENDS_ONE, True, children)

    rules.append(Rule(
        "R-JACKI", "JackI", _Q["JackI"],
        ("factors finitely presented, 1-ended", "edge group multi-ended"),
        ("ends_one",), fire_jacki,
    ))

    def fire_jackii(registry, facts, gname, expr):
        if not isinstance(expr, HNN):
            return
        base = _gather(facts, expr.base, [(A.FP, True), (A.ENDS_ONE, True)])
        assoc = _gather(facts, expr.assoc, [(A.FG, True), (A.ENDS_INFINITE, True)])
        if base is None or assoc is None:
            return
        rule = _BY_NAME["R-JACKII"]
        yield rule.conclude(gname, A.ENDS_ONE, True, base + assoc)

    rules.append(Rule(
        "R-JACKII", "JackII", _Q["JackII"],
        ("base finitely presented, 1-ended", "associated subgroup multi-ended"),
        ("ends_one",), fire_jackii,
    ))

    def fire_jhom(registry, facts, gname, expr):
        rule = _BY_NAME["R-JHOM"]
        if isinstance(expr, Amalgam):
            children = []
            for part in (expr.a, expr.b):
                got = _gather(facts, part, [(A.FP, True), (A.ENDS_ONE, True)])
                if got is None:
                    return
                children += got
            edge = _gather(facts, expr.c, [(A.FG, True), (A.ENDS_INFINITE, True)])
            if edge is None:
                return
            yield rule.conclude(gname, A.H2_NONTRIVIAL, True, children + edge)
        elif isinstance(expr, HNN):
            base = _gather(facts, expr.base, [(A.FP, True), (A.ENDS_ONE, True)])
            assoc = _gather(
                facts, expr.assoc, [(A.FG, True), (A.ENDS_INFINITE, True)]
            )
            if base is None or assoc is None:
                return
            yield rule.conclude(gname, A.H2_NONTRIVIAL, True, base + assoc)

    rules.append(Rule(
        "R-JHOM", "JHom", _Q["JHom"],
        ("vertex groups finitely presented, 1-ended",
         "edge group multi-ended"),
        ("h2_nontrivial",), fire_jhom,
    ))

    def fire_jackii_sc(registry, facts, gname, expr):
        rule = _BY_NAME["R-JACKIIi"]
        if isinstance(expr, Amalgam):
            # Theorem 2 (amalgam form) shares the conclusion
            children = []
            for part in (expr.a, expr.b):
                got = _gather(
                    facts, part,
                    [(A.FP, True), (A.ENDS_ONE, True), (A.SC_INF, True)],
                )
                if got is None:
                    return
                children += got
            edge = _gather(facts, expr.c, [(A.FG, True), (A.ENDS_ONE, True)])
            if edge is None:
                return
            yield rule.conclude(gname, A.SC_INF, True, children + edge)
        elif isinstance(expr, HNN):
            base = _gather(
                facts, expr.base,
                [(A.FP, True), (A.ENDS_ONE, True), (A.SC_INF, True)],
            )
            assoc = _gather(facts, expr.assoc, [(A.FG, True), (A.ENDS_ONE, True)])
            if base is None or assoc is None:
                return
            yield rule.conclude(gname, A.ENDS_ONE, True, base + assoc)
            yield rule.conclude(gname, A.SC_INF, True, base + assoc)

    rules.append(Rule(
        "R-JACKIIi", "JackIIi", _Q["JackIIi"],
        ("base finitely presented, 1-ended, simply connected at infinity",
         "associated/edge subgroup finitely generated and 1-ended"),
        ("sc_inf",), fire_jackii_sc,
    ))

    def fire_h2red(registry, facts, gname, expr):
        if not (isinstance(expr, Amalgam) and expr.edge_finite):
            return
        rule = _BY_NAME["R-H2RED"]
        for atom in (A.H2_TRIVIAL, A.H2_FREE_ABELIAN):
            certs = [facts.get(p, atom, True) for p in (expr.a, expr.b)]
            if None not in certs:
                yield rule.conclude(gname, atom, True, certs)

    rules.append(Rule(
        "R-H2RED", "Reduction", _Q["Reduction"],
        ("finite edge group", "H2 class of both vertex groups"),
        ("matching H2 class",), fire_h2red,
    ))

    def fire_ahnn(registry, facts, gname, expr):
        if not (isinstance(expr, HNN) and expr.ascending):
            return
        base = _gather(facts, expr.base, [(A.INFINITE, True), (A.FP, True)])
        if base is None:
            return
        rule = _BY_NAME["R-AHNN"]
        note = "constructor: ascending HNN extension"
        yield rule.conclude(gname, A.ENDS_ONE, True, base, note)
        yield rule.conclude(gname, A.SEMISTABLE, True, base, note)
        one = facts.get(expr.base, A.ENDS_ONE, True)
        if one is not None:
            yield rule.conclude(gname, A.SC_INF, True, base + [one], note)

    rules.append(Rule(
        "R-AHNN", "MM", _Q["MM"],
        ("ascending HNN extension of an infinite finitely presented base",),
        ("ends_one", "semistable", "sc_inf when the base is 1-ended"),
        fire_ahnn,
    ))

    def fire_hnn_fi(registry, facts, gname, expr):
        if not (isinstance(expr, HNN) and expr.finite_index_image):
            return
        base = _gather(facts, expr.base, [(A.INFINITE, True), (A.FG, True)])
        if base is None:
            return
        rule = _BY_NAME["R-HNN-FI"]
        note = "constructor: associated subgroup of finite index in the base"
        yield rule.conclude(gname, A.ENDS_ONE, True, base, note)

    rules.append(Rule(
        "R-HNN-FI", "MMFIE", _Q["MMFIE"],
        ("HNN extension with finite-index associated subgroup",
         "base infinite and finitely generated"),
        ("ends_one",), fire_hnn_fi,
    ))

    def fire_m1(registry, facts, gname, expr):
        if not isinstance(expr, Extension):
            return
        kernel = _gather(facts, expr.kernel, [(A.INFINITE, True), (A.FG, True)])
        quot = facts.get(expr.quotient, A.INFINITE, True)
        whole = facts.get(gname, A.FP, True)
        if kernel is None or quot is None or whole is None:
            return
        rule = _BY_NAME["R-M1"]
        note = "infinite quotient gives the kernel infinite index"
        yield rule.conclude(gname, A.SEMISTABLE, True, kernel + [quot, whole], note)

    rules.append(Rule(
        "R-M1", "M1", _Q["M1"],
        ("kernel infinite and finitely generated",
         "quotient infinite", "whole group finitely presented"),
        ("semistable",), fire_m1,
    ))

    def fire_jackson(registry, facts, gname, expr):
        if not isinstance(expr, Extension):
            return
        kernel = _gather(facts, expr.kernel, [(A.INFINITE, True), (A.FP, True)])
        quot = facts.get(expr.quotient, A.INFINITE, True)
        whole = facts.get(gname, A.FP, True)
        if kernel is None or quot is None or whole is None:
            return
        one = _any_of(facts, expr.kernel, [(A.ENDS_ONE, True)]) or facts.get(
            expr.quotient, A.ENDS_ONE, True
        )
        if one is None:
            return
        rule = _BY_NAME["R-JACKSON"]
        yield rule.conclude(gname, A.SC_INF, True, kernel + [quot, whole, one])

    rules.append(Rule(
        "R-JACKSON", "J", _Q["J"],
        ("kernel infinite and finitely presented", "quotient infinite",
         "whole group finitely presented", "kernel or quotient 1-ended"),
        ("sc_inf",), fire_jackson,
    ))

    def fire_comm(registry, facts, gname, expr):
        if not (isinstance(expr, CommensuratedPair) and expr.infinite_index):
            return
        target = expr.ambient
        whole = facts.get(target, A.FG, True)
        sub = _gather(facts, expr.subgroup, [(A.INFINITE, True), (A.FG, True)])
        if whole is None or sub is None:
            return
        rule = _BY_NAME["R-COMM"]
        note = "constructor: commensurated subgroup of infinite index"
        yield rule.conclude(target, A.ENDS_ONE, True, [whole] + sub, note)
        yield rule.conclude(target, A.SEMISTABLE, True, [whole] + sub, note)

    rules.append(Rule(
        "R-COMM", "MainCM", _Q["MainCM"],
        ("ambient group finitely generated",
         "commensurated subgroup infinite, finitely generated, infinite index"),
        ("ends_one", "semistable"), fire_comm,
    ))

    def fire_scprod(registry, facts, gname, expr):
        if not (isinstance(expr, DirectProduct) and len(expr.factors) == 2):
            return
        whole = _gather(
            facts, gname, [(A.FG, True), (A.RECURSIVELY_PRESENTED, True)]
        )
        if whole is None:
            return
        a, b = expr.factors
        rule = _BY_NAME["R-SCPROD"]
        for first, second in ((a, b), (b, a)):
            got = _gather(
                facts, first,
                [(A.FG, True), (A.INFINITE, True), (A.ENDS_ONE, True)],
            )
            other = _gather(facts, second, [(A.FG, True), (A.INFINITE, True)])
            if got is not None and other is not None:
                yield rule.conclude(gname, A.SC_INF, True, whole + got + other)
                return

    rules.append(Rule(
        "R-SCPROD", "sc", _Q["sc"],
        ("recursively presented product of two infinite finitely generated"
         " groups, one 1-ended",),
        ("sc_inf",), fire_scprod,
    ))

    # Bridges to the structural deciders.
    def fire_coxe(registry, facts, gname, expr):
        if not isinstance(expr, Coxeter) or not expr.diagram.vertices:
            return
        report = coxeter_ends(CoxeterSystem(expr.diagram))
        rule = _BY_NAME["R-COXE"]
        note = f"decider witness: {report.witness}"
        yield rule.conclude(gname, ENDS_ATOMS[report.ends], True, [], note)

    rules.append(Rule(
        "R-COXE", "CoxE", _Q["CoxE"] + " / " + _Q["Cox2E"],
        ("Coxeter presentation diagram",), ("ends per the diagram criteria",),
        fire_coxe,
    ))

    def fire_artine(registry, facts, gname, expr):
        if not isinstance(expr, Artin) or not expr.diagram.vertices:
            return
        report = artin_one_ended(expr.diagram)
        rule = _BY_NAME["R-ARTINE"]
        if report.ends is not None:
            yield rule.conclude(gname, ENDS_ATOMS[report.ends], True, [])

    rules.append(Rule(
        "R-ARTINE", "ArtinE", _Q["ArtinE"],
        ("Artin presentation diagram",), ("ends for connected/degenerate diagrams",),
        fire_artine,
    ))

    def fire_acss(registry, facts, gname, expr):
        if not isinstance(expr, (Coxeter, Artin)):
            return
        rule = _BY_NAME["R-ACSS"]
        yield rule.conclude(gname, A.SEMISTABLE, True, [])

    rules.append(Rule(
        "R-ACSS", "ACSS", _Q["ACSS"],
        ("Coxeter or Artin presentation",), ("semistable",), fire_acss,
    ))

    def fire_gp(registry, facts, gname, expr):
        if not isinstance(expr, GraphProduct) or not expr.graph.vertices:
            return
        rule = _BY_NAME["R-GP"]
        profiles = {}
        children = []
        complete = True
        for vertex, ref in expr.vertex_groups:
            prof, used = _vertex_profile(registry, facts, ref)
            profiles[vertex] = prof
            children += used
            if prof.finite is None or prof.ends is None:
                complete = False
        spec = GraphProductSpec(expr.graph, profiles)
        if complete:
            report = graph_product_ends(spec)
            note = f"decider witness: {report.witness}"
            yield rule.conclude(gname, ENDS_ATOMS[report.ends], True, children, note)
        try:
            ss = graph_product_semistable(spec)
        except (DisconnectedGraphError, UnknownProfileError):
            return
        if ss.verdict == "semistable":
            yield rule.conclude(gname, A.SEMISTABLE, True, children)
        elif ss.verdict == "not_semistable":
            note = f"decider witness: {ss.witness}"
            yield rule.conclude(gname, A.SEMISTABLE, False, children, note)

    rules.append(Rule(
        "R-GP", "OV", _Q["OV"] + " / " + _Q["GraphP"],
        ("graph product with profiled vertex groups",),
        ("ends and semistability per the graph criteria",), fire_gp,
    ))

    global _BY_NAME
    _BY_NAME = {r.name: r for r in rules}
    return tuple(rules)


_BY_NAME: dict = {}


def _vertex_profile(registry, facts, ref):
    """Build a VertexProfile for a referenced group from derived facts."""
    used = []

    def look(atom, holds=True):
        c = facts.get(ref, atom, holds)
        if c is not None:
            used.append(c)
        return c

    finite = None
    if look(A.FINITE):
        finite = True
    elif look(A.INFINITE):
        finite = False
    order = None
    expr = registry.groups.get(ref)
    if isinstance(expr, Finite):
        order = expr.order
    ends = None
    for count, atom in ENDS_ATOMS.items():
        if look(atom):
            ends = count
            break
    semistable = None
    if look(A.SEMISTABLE, True):
        semistable = True
    elif look(A.SEMISTABLE, False):
        semistable = False
    fp = None
    if look(A.FP, True):
        fp = True
    elif look(A.FP, False):
        fp = False
    return VertexProfile(finite, order, ends, semistable, fp), used


# --- Engine -----------------------------------------------------------------------

def infer(registry: GroupRegistry, extra_facts=()) -> FactSet:
    """Least fixpoint of the rule table over asserted, database and structural
    facts.  Raises ContradictionError when both polarities of a fact appear."""
    rules = builtin_rules()
    facts = FactSet()
    for cert in structural_facts(registry):
        facts.add(cert)
    for name, assertions in registry.assertions.items():
        for a in assertions:
            facts.add(
                Certificate(
                    a.target, a.atom, a.holds,
                    provenance=f"{a.source} assertion",
                )
            )
    for a in extra_facts:
        if isinstance(a, AttributeAssertion):
            facts.add(
                Certificate(
                    a.target, a.atom, a.holds,
                    provenance=f"{a.source} assertion",
                )
            )
        else:
            facts.add(a)

    changed = True
    while changed:
        changed = False
        for gname, expr in registry.groups.items():
            for rule in rules:
                for cert in rule.fire(registry, facts, gname, expr) or ():
                    if facts.add(cert):
                        changed = True
    return facts


def explain(facts: FactSet, group, atom, holds=True) -> str:
    """Textual derivation tree for one derived fact."""
    cert = facts.get(group, atom, holds)
    if cert is None:
        raise FactNotDerivedError(group, atom)
    lines = []

    def render(c, depth):
        pol = "" if c.holds else "not "
        head = f"{'  ' * depth}{c.group} : {pol}{c.atom.value}"
        if c.is_leaf():
            lines.append(f"{head}  [{c.provenance}]")
        else:
            lines.append(f"{head}  [rule {c.rule}, theorem {c.tag}]")
            lines.append(f"{'  ' * depth}  quote: {c.quote}")
            if c.provenance:
                lines.append(f"{'  ' * depth}  note: {c.provenance}")
            for child in c.children:
                render(child, depth + 1)

    render(cert, 0)
    return "\n".join(lines)


def certificate_leaves(cert: Certificate):
    """All leaf certificates under a derivation tree."""
    if cert.is_leaf():
        return [cert]
    out = []
    for child in cert.children:
        out += certificate_leaves(child)
    return out


def replay(registry: GroupRegistry, facts: FactSet) -> bool:
    """Re-derive the fact set from the leaf assertions of its certificates.

    Returns True when the replayed fixpoint equals the original fact set.
    """
    leaves = {}
    for cert in facts.certificates():
        for leaf in certificate_leaves(cert):
            leaves[leaf.fact()] = leaf
    replayed = infer(registry, extra_facts=list(leaves.values()))
    return set(replayed.facts()) == set(facts.facts())


def certificate_as_dict(cert: Certificate):
    d = {
        "group": cert.group,
        "atom": cert.atom.value,
        "holds": cert.holds,
    }
    if cert.is_leaf():
        d["provenance"] = cert.provenance
    else:
        d["rule"] = cert.rule
        d["theorem"] = cert.tag
        d["quote"] = cert.quote
        if cert.provenance:
            d["note"] = cert.provenance
        d["premises"] = [certificate_as_dict(c) for c in cert.children]
    return d
