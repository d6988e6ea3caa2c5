"""Mittag-Leffler analysis of towers of finitely generated free abelian groups.

A tower is an inverse sequence Z^{n_1} <- Z^{n_2} <- ... with integer bonding
matrices.  Images are tracked as integer lattices in canonical (column)
Hermite normal form, so chain comparisons are exact.  All arithmetic is
arbitrary precision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import IndexOutOfRangeError, ParseError


# --- Integer lattice machinery ------------------------------------------------

def hermite_normal_form(matrix):
    """Canonical column-style HNF basis of the lattice spanned by the columns.

    Returns a tuple of basis columns (tuples of ints): each pivot is the first
    nonzero entry of its column, positive, with pivot rows strictly
    increasing; entries of earlier columns in a pivot row are reduced into
    [0, pivot).  The result is unique per lattice.
    """
    if not matrix:
        return ()
    n = len(matrix)
    cols = [list(col) for col in zip(*matrix) if any(col)]
    pivots = []  # finished columns, in pivot-row order
    for r in range(n):
        nz = [c for c in cols if c[r] != 0]
        rest = [c for c in cols if c[r] == 0]
        if not nz:
            cols = rest
            continue
        while len(nz) > 1:
            nz.sort(key=lambda c: abs(c[r]))
            base = nz[0]
            keep = [base]
            for c in nz[1:]:
                q = c[r] // base[r]
                for k in range(r, n):
                    c[k] -= q * base[k]
                if c[r] != 0:
                    keep.append(c)
                elif any(c):
                    rest.append(c)
            nz = keep
        pivot = nz[0]
        if pivot[r] < 0:
            for k in range(n):
                pivot[k] = -pivot[k]
        for done in pivots:
            q = done[r] // pivot[r]
            if q:
                for k in range(r, n):
                    done[k] -= q * pivot[k]
        pivots.append(pivot)
        cols = rest
    return tuple(tuple(c) for c in pivots)


def image_lattice(matrix):
    """HNF basis of the integer column span of `matrix`."""
    return hermite_normal_form(matrix)


def lattice_rank(basis):
    return len(basis)


def lattice_contains(basis, vector):
    """Membership of an integer vector in the lattice with HNF basis `basis`."""
    v = list(vector)
    for col in basis:
        r = next(i for i, x in enumerate(col) if x != 0)
        if v[r] % col[r] != 0:
            return False
        q = v[r] // col[r]
        if q:
            for k in range(r, len(v)):
                v[k] -= q * col[k]
    return not any(v)


def lattice_includes(outer, inner):
    """True when every basis vector of `inner` lies in `outer`."""
    return all(lattice_contains(outer, col) for col in inner)


def mat_product(a, b):
    """a (p x q) times b (q x r) over the integers."""
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix shapes do not chain")
    bt = list(zip(*b)) if b else []
    return tuple(
        tuple(sum(ra[k] * cb[k] for k in range(len(ra))) for cb in bt) for ra in a
    )


def mat_identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


# --- Towers --------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianTower:
    """Explicit tower: ranks n_1, n_2, ... and bondings p_i : Z^{n_{i+1}} -> Z^{n_i}
    (so p_i is an n_i x n_{i+1} matrix).  Constant towers repeat one square
    matrix forever."""

    ranks: tuple
    bondings: tuple  # tuple of matrices (tuples of row tuples)
    constant: bool = False

    @staticmethod
    def explicit(ranks, bondings):
        ranks = tuple(int(r) for r in ranks)
        bondings = tuple(tuple(tuple(int(x) for x in row) for row in b) for b in bondings)
        if len(bondings) != len(ranks) - 1:
            raise ValueError("need one bonding per consecutive rank pair")
        for i, b in enumerate(bondings):
            if len(b) != ranks[i] or any(len(row) != ranks[i + 1] for row in b):
                raise ValueError(f"bonding {i + 1} must have shape {ranks[i]} x {ranks[i + 1]}")
        return AbelianTower(ranks, bondings, constant=False)

    @staticmethod
    def constant_tower(rank, matrix):
        rank = int(rank)
        matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        if len(matrix) != rank or any(len(row) != rank for row in matrix):
            raise ValueError(f"matrix must be {rank} x {rank}")
        return AbelianTower((rank,), (matrix,), constant=True)

    def rank_at(self, i):
        """Rank of G_i (1-based)."""
        if self.constant:
            return self.ranks[0]
        if not 1 <= i <= len(self.ranks):
            raise IndexOutOfRangeError(f"tower has {len(self.ranks)} stages, asked for {i}")
        return self.ranks[i - 1]

    def bonding(self, i):
        """Matrix of p_i : G_{i+1} -> G_i (1-based)."""
        if self.constant:
            return self.bondings[0]
        if not 1 <= i <= len(self.bondings):
            raise IndexOutOfRangeError(
                f"tower defines bondings p_1..p_{len(self.bondings)}, asked for p_{i}"
            )
        return self.bondings[i - 1]


@dataclass(frozen=True)
class ImageChain:
    base: int  # index m
    lattices: tuple  # HNF bases of image(G_k -> G_m) for k = m .. m+N


@dataclass(frozen=True)
class MLVerdict:
    kind: str  # "semistable" | "strictly_descending" | "inconclusive"
    stabilization_index: int | None = None  # phi(m) for semistable
    first_witness: int | None = None  # first strict drop for descending
    window: int | None = None

    def as_dict(self):
        return {
            "kind": self.kind,
            "stabilization_index": self.stabilization_index,
            "first_witness": self.first_witness,
            "window": self.window,
        }


MIN_CONFIRMING_STEPS = 3


def ml_check_window(tower: AbelianTower, m: int, N: int):
    """Image chain L_m >= L_{m+1} >= ... >= L_{m+N} inside G_m and a verdict.

    Semistable needs the chain eventually constant with at least
    MIN_CONFIRMING_STEPS confirming steps; strictly descending means every
    consecutive inclusion is proper.
    """
    if m < 1 or N < 1:
        raise IndexOutOfRangeError("need m >= 1 and N >= 1")
    n_m = tower.rank_at(m)
    lattices = [image_lattice(mat_identity(n_m))]
    composite = mat_identity(n_m)
    for k in range(m, m + N):
        composite = mat_product(composite, tower.bonding(k))
        lattices.append(image_lattice(composite))
    chain = ImageChain(m, tuple(lattices))
    # sanity: the chain must be descending
    for a, b in zip(lattices, lattices[1:]):
        assert lattice_includes(a, b)

    equal_next = [lattices[i] == lattices[i + 1] for i in range(len(lattices) - 1)]
    if not any(equal_next):
        return chain, MLVerdict("strictly_descending", first_witness=m, window=N)
    # smallest j with L_j = L_{j+1} = ... = L_{m+N}
    j = len(equal_next)
    while j > 0 and equal_next[j - 1]:
        j -= 1
    confirming = len(equal_next) - j
    if confirming >= MIN_CONFIRMING_STEPS:
        return chain, MLVerdict("semistable", stabilization_index=m + j, window=N)
    return chain, MLVerdict("inconclusive", window=N)


def ml_decide_constant(rank: int, matrix) -> MLVerdict:
    """Exact, window-free verdict for the tower Z^n <-A- Z^n <-A- ...

    The image chain im(A^k) stabilizes in rank by k = n; once the rational
    span is stable the per-step index is constant, so a single lattice
    comparison decides the whole tower.
    """
    tower = AbelianTower.constant_tower(rank, matrix)
    A = tower.bondings[0]
    powers = [mat_identity(rank)]
    for _ in range(rank + 1):
        powers.append(mat_product(powers[-1], A))
    k_star = 0
    while lattice_rank(image_lattice(powers[k_star])) != lattice_rank(
        image_lattice(powers[k_star + 1])
    ):
        k_star += 1
    if image_lattice(powers[k_star]) == image_lattice(powers[k_star + 1]):
        return MLVerdict("semistable", stabilization_index=k_star + 1)
    return MLVerdict("strictly_descending", first_witness=k_star + 1)


def lim1_report(verdict: MLVerdict, countable: bool = True):
    """Triviality of the derived limit lim^1, with the citation attached."""
    citation = (
        "Theorem 11.3.2: if the inverse sequence is semistable then lim^1 is "
        "trivial; if lim^1 is trivial and each group is countable, the "
        "sequence is semistable"
    )
    if verdict.kind == "semistable":
        status = "trivial"
    elif verdict.kind == "strictly_descending" and countable:
        status = "nontrivial"
    else:
        status = "undetermined"
    return {"lim1": status, "citation": citation, "verdict": verdict.as_dict()}


# --- Tower text format ----------------------------------------------------------

_WS = re.compile(r"\s+")


def parse_tower(text: str) -> AbelianTower:
    """Parse the tower block format.

    Explicit:  tower { ranks: 2 2 ; bond 1: 1 0, 0 1 ; }
    Constant:  tower constant { rank 1 ; matrix 2 ; }

    Matrix rows are comma separated, entries whitespace separated.
    """
    stripped = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    flat = _WS.sub(" ", stripped).strip()
    m = re.fullmatch(r"tower\s*(constant)?\s*\{(.*)\}", flat)
    if not m:
        raise ParseError("expected 'tower { ... }' or 'tower constant { ... }'", 1, 1)
    constant = m.group(1) is not None
    body = m.group(2)
    stmts = [s.strip() for s in body.split(";") if s.strip()]

    def rows_of(s):
        return tuple(
            tuple(int(x) for x in row.split()) for row in s.split(",") if row.strip()
        )

    if constant:
        rank = None
        matrix = None
        for s in stmts:
            if s.startswith("rank"):
                rank = int(s[len("rank"):])
            elif s.startswith("matrix"):
                matrix = rows_of(s[len("matrix"):])
            else:
                raise ParseError(f"unknown tower statement {s!r}", 1, 1)
        if rank is None or matrix is None:
            raise ParseError("constant tower needs 'rank' and 'matrix'", 1, 1)
        return AbelianTower.constant_tower(rank, matrix)

    ranks = None
    bonds = {}
    for s in stmts:
        if s.startswith("ranks:"):
            ranks = tuple(int(x) for x in s[len("ranks:"):].split())
        elif s.startswith("bond"):
            head, _, rest = s.partition(":")
            k = int(head[len("bond"):])
            bonds[k] = rows_of(rest)
        else:
            raise ParseError(f"unknown tower statement {s!r}", 1, 1)
    if ranks is None:
        raise ParseError("explicit tower needs 'ranks:'", 1, 1)
    bondings = [bonds[k] for k in sorted(bonds)]
    if sorted(bonds) != list(range(1, len(ranks))):
        raise ParseError("bond indices must be 1..len(ranks)-1", 1, 1)
    return AbelianTower.explicit(ranks, bondings)
