"""Coxeter engine: finite-type recognition, end counts, Tits normal form."""

import itertools
import math
import random

import numpy
import pytest

from endscope.atoms import EndCount
from endscope.coxeter import (
    CoxeterSystem,
    artin_one_ended,
    coxeter_ends,
    enumerate_elements,
    is_finite_type,
    tits_normal_form,
)
from endscope.errors import OrbitBudgetExceededError
from endscope.graphs import LabeledGraph


def system(verts, edges=()):
    return CoxeterSystem(LabeledGraph.build(verts, edges))


FINITE_ORDERS = {
    # diagram -> group order, independent of the decider (classical orders)
    "A1": (system("a"), 2),
    "A1xA1": (system("ab", [("a", "b", 2)]), 4),
    "A2": (system("ab", [("a", "b", 3)]), 6),
    "I2(5)": (system("ab", [("a", "b", 5)]), 10),
    "A3": (system("abc", [("a", "b", 3), ("b", "c", 3), ("a", "c", 2)]), 24),
    "B3": (system("abc", [("a", "b", 4), ("b", "c", 3), ("a", "c", 2)]), 48),
    "H3": (system("abc", [("a", "b", 5), ("b", "c", 3), ("a", "c", 2)]), 120),
    "A1xA2": (
        system("abc", [("a", "b", 3), ("b", "c", 2), ("a", "c", 2)]),
        12,
    ),
}


def test_finite_type_catalog_orders():
    for name, (sys_, order) in FINITE_ORDERS.items():
        assert is_finite_type(sys_).is_finite, name
        elements = enumerate_elements(sys_, cap=200)
        assert elements is not None and len(elements) == order, name


def test_finite_type_families_reported():
    ft = is_finite_type(system("abc", [("a", "b", 4), ("b", "c", 3), ("a", "c", 2)]))
    families = {fam for _, fam in ft.component_types}
    assert families == {"B3"}


def test_affine_triangle_is_infinite():
    tri = system("abc", [("a", "b", 3), ("b", "c", 3), ("a", "c", 3)])
    assert not is_finite_type(tri).is_finite
    assert enumerate_elements(tri, cap=500) is None


def test_finite_type_agrees_with_cosine_matrix_eigenvalues():
    # independent numeric oracle: finite type iff the cosine matrix
    # B[i][j] = -cos(pi / m_ij) (with m_ii = 1) is positive definite
    rng = random.Random(5)
    for _ in range(40):
        n = rng.randint(1, 4)
        verts = list(range(n))
        edges = [
            (u, v, rng.choice([2, 3, 4, 5, 6]))
            for u, v in itertools.combinations(verts, 2)
            if rng.random() < 0.6
        ]
        g = LabeledGraph.build(verts, edges)
        sys_ = CoxeterSystem(g)
        B = numpy.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if i == j:
                    B[i][j] = 1.0
                else:
                    m = g.label(i, j)
                    B[i][j] = -math.cos(math.pi / m) if m else -1.0
        positive_definite = bool(numpy.all(numpy.linalg.eigvalsh(B) > 1e-9))
        assert is_finite_type(sys_).is_finite == positive_definite, edges


def test_finite_type_agrees_with_enumeration():
    # labels <= 4 keep every finite group on <= 4 generators below the cap
    rng = random.Random(17)
    for _ in range(20):
        n = rng.randint(1, 4)
        verts = list(range(n))
        edges = [
            (u, v, rng.choice([2, 3, 4]))
            for u, v in itertools.combinations(verts, 2)
            if rng.random() < 0.7
        ]
        sys_ = CoxeterSystem(LabeledGraph.build(verts, edges))
        elements = enumerate_elements(sys_, cap=2000)
        assert is_finite_type(sys_).is_finite == (elements is not None), edges


END_BATTERY = (
    (system("a"), EndCount.ZERO),
    (system("ab", [("a", "b", 5)]), EndCount.ZERO),
    (system("ab"), EndCount.TWO),
    (system("abc", [("a", "b", 2), ("b", "c", 2)]), EndCount.TWO),
    (
        system(
            "abcd",
            [("a", "b", 2), ("b", "c", 2), ("c", "d", 2), ("d", "a", 2)],
        ),
        EndCount.ONE,
    ),
    (system("abc"), EndCount.INFINITE),
    (system("abc", [("a", "b", 3), ("b", "c", 3), ("a", "c", 3)]), EndCount.ONE),
)


def test_coxeter_end_battery():
    for sys_, expected in END_BATTERY:
        assert coxeter_ends(sys_).ends == expected


def test_zero_ends_iff_finite_type():
    rng = random.Random(23)
    for _ in range(40):
        n = rng.randint(1, 4)
        verts = list(range(n))
        edges = [
            (u, v, rng.choice([2, 3, 5]))
            for u, v in itertools.combinations(verts, 2)
            if rng.random() < 0.6
        ]
        sys_ = CoxeterSystem(LabeledGraph.build(verts, edges))
        assert (coxeter_ends(sys_).ends == EndCount.ZERO) == is_finite_type(sys_).is_finite


def test_two_ended_witness_reported():
    report = coxeter_ends(system("abc", [("a", "b", 2), ("b", "c", 2)]))
    assert report.ends == EndCount.TWO
    assert report.witness


def test_artin_one_ended():
    # connected with >= 2 vertices: one-ended
    tri = LabeledGraph.build("abc", [("a", "b", 3), ("b", "c", 2), ("a", "c", 2)])
    report = artin_one_ended(tri)
    assert report.one_ended and report.ends == EndCount.ONE
    # single vertex: the group is Z, two ends
    single = artin_one_ended(LabeledGraph.build("a"))
    assert not single.one_ended and single.ends == EndCount.TWO
    # disconnected: free product of infinite groups
    split = artin_one_ended(LabeledGraph.build("ab"))
    assert not split.one_ended and split.ends == EndCount.INFINITE


def test_tits_normal_form_basics():
    sys_ = system("st", [("s", "t", 3)])
    assert tits_normal_form(("s", "s"), sys_) == ()
    assert tits_normal_form(("s", "t", "s"), sys_) == tits_normal_form(
        ("t", "s", "t"), sys_
    )
    assert len(tits_normal_form(("s", "t", "s", "t"), sys_)) == 2


def test_tits_normal_form_is_congruence():
    rng = random.Random(31)
    systems = [
        system("st", [("s", "t", 3)]),
        system("stu", [("s", "t", 3), ("t", "u", 4)]),
        system("stuv", [("s", "t", 3), ("t", "u", 2), ("u", "v", 3)]),
    ]
    for sys_ in systems:
        gens = sys_.generators
        for _ in range(40):
            u = tuple(rng.choice(gens) for _ in range(rng.randint(0, 6)))
            v = tuple(rng.choice(gens) for _ in range(rng.randint(0, 6)))
            assert tits_normal_form(u + v, sys_) == tits_normal_form(
                tits_normal_form(u, sys_) + v, sys_
            )


def test_orbit_budget_is_an_error_not_a_wrong_answer():
    sys_ = system("st", [("s", "t", 3)])
    with pytest.raises(OrbitBudgetExceededError):
        tits_normal_form(("s", "t", "s"), sys_, budget=1)
