"""Tests for element enumeration, classes, intersections, cores, cosets."""

import numpy as np
import pytest

from mindim import GeneratedGroup, InputError, Permutation
from mindim.groupanalysis import (
    GroupContext,
    core,
    double_cosets,
    enumerate_elements,
    frattini,
    prime_order_classes,
    subgroup_intersection,
)


def cyc(degree, *cycles):
    return Permutation.from_cycles(degree, cycles)


@pytest.fixture(scope="module")
def a5():
    return GroupContext(GeneratedGroup(5, [cyc(5, (0, 1, 2, 3, 4)), cyc(5, (0, 1, 2))], label="A5"))


@pytest.fixture(scope="module")
def s3():
    return GroupContext(GeneratedGroup(3, [cyc(3, (0, 1, 2)), cyc(3, (0, 1))], label="S3"))


def closure_elements(group):
    seen = {Permutation.identity(group.degree).key()}
    frontier = [Permutation.identity(group.degree)]
    while frontier:
        nxt = []
        for p in frontier:
            for g in group.generators:
                q = p * g
                if q.key() not in seen:
                    seen.add(q.key())
                    nxt.append(q)
        frontier = nxt
    return seen


def test_enumerate_trivial():
    ctx = GroupContext(GeneratedGroup(4, [Permutation.identity(4)]))
    els = list(enumerate_elements(ctx.chain))
    assert len(els) == 1 and els[0].is_identity()


def test_enumerate_a5_distinct(a5):
    els = list(enumerate_elements(a5.chain))
    assert len(els) == 60
    assert len({e.key() for e in els}) == 60


def test_enumerate_m11_against_closure():
    # M11 on 11 points; order by breadth-first closure oracle
    gens = [
        cyc(11, (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10)),
        cyc(11, (2, 6, 10, 7), (3, 9, 4, 5)),
    ]
    group = GeneratedGroup(11, gens, label="M11")
    ctx = GroupContext(group)
    assert ctx.order == 7920
    keys = closure_elements(group)
    assert len(keys) == 7920
    table_keys = {bytes(v) for v in ctx.table._void}
    assert table_keys == keys


def test_prime_order_classes_s3(s3):
    classes = prime_order_classes(s3)
    data = sorted((c.element_order, c.size) for c in classes)
    assert data == [(2, 3), (3, 2)]


def test_prime_order_classes_a5(a5):
    classes = prime_order_classes(a5)
    data = sorted((c.element_order, c.size) for c in classes)
    assert data == [(2, 15), (3, 20), (5, 12), (5, 12)]


def test_prime_order_classes_brute_force(a5):
    # oracle: partition prime-order elements by full conjugation
    els = list(enumerate_elements(a5.chain))
    prime_els = [e for e in els if e.order() in (2, 3, 5)]
    seen = set()
    sizes = []
    for e in prime_els:
        if e.key() in seen:
            continue
        cls = {(g.inverse() * e * g).key() for g in els}
        seen |= cls
        sizes.append((e.order(), len(cls)))
    assert sorted(sizes) == sorted((c.element_order, c.size) for c in prime_order_classes(a5))
    # union of class sizes = number of prime order elements
    assert sum(c.size for c in prime_order_classes(a5)) == len(prime_els)


def test_prime_order_classes_trivial():
    ctx = GroupContext(GeneratedGroup(3, [Permutation.identity(3)]))
    assert prime_order_classes(ctx) == []


def test_intersection_self(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    assert subgroup_intersection(h, h).order == h.order


def test_intersection_two_point_stabilizers(a5):
    # Stab(4) cap Stab(3) in A5 has order 3
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    k = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 4))])
    assert h.order == k.order == 12
    meet = subgroup_intersection(h, k)
    assert meet.order == 3


def test_intersection_commutative_associative(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    k = a5.subgroup([cyc(5, (0, 1, 2, 3, 4))])
    m = a5.subgroup([cyc(5, (0, 1), (2, 3))])
    hk = subgroup_intersection(h, k)
    kh = subgroup_intersection(k, h)
    assert np.array_equal(hk.ranks, kh.ranks)
    a = subgroup_intersection(subgroup_intersection(h, k), m)
    b = subgroup_intersection(h, subgroup_intersection(k, m))
    assert np.array_equal(a.ranks, b.ranks)


def test_core_simple_group_trivial(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    assert core(a5, h).order == 1


def test_core_normal_subgroup():
    c4 = GroupContext(GeneratedGroup(4, [cyc(4, (0, 1, 2, 3))], label="C4"))
    h = c4.subgroup([cyc(4, (0, 2), (1, 3))])
    c = core(c4, h)
    assert c.order == 2
    assert np.array_equal(c.ranks, h.ranks)


def test_frattini_a5_trivial(a5):
    # all three maximal classes, all conjugates, intersect to 1
    maximals = [
        a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))]),     # A4
        a5.subgroup([cyc(5, (0, 1, 2, 3, 4)), cyc(5, (1, 4), (2, 3))]),  # D10
        a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (0, 1), (3, 4))]),        # S3
    ]
    assert frattini(a5, maximals, complete=True).order == 1


def test_frattini_c4():
    c4 = GroupContext(GeneratedGroup(4, [cyc(4, (0, 1, 2, 3))], label="C4"))
    h = c4.subgroup([cyc(4, (0, 2), (1, 3))])
    f = frattini(c4, [h], complete=True)
    assert f.order == 2


def test_frattini_refuses_incomplete(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    with pytest.raises(InputError):
        frattini(a5, [h], complete=False)


def test_double_cosets_a4(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])  # A4 = Stab(4)
    dc = double_cosets(a5, h, h)
    sizes = sorted(size for _, size in dc)
    assert sizes == [12, 48]
    assert sum(sizes) == 60


def test_double_cosets_whole_group(a5):
    g = a5.subgroup(a5.group.generators)
    dc = double_cosets(a5, g, g)
    assert len(dc) == 1 and dc[0][1] == 60


def test_double_cosets_size_identity(a5):
    # |HgK| = |H| * (K-orbit length of coset Hg), checked both ways
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    k = a5.subgroup([cyc(5, (0, 1), (2, 3)), cyc(5, (0, 2), (1, 3))])
    dc = double_cosets(a5, h, k)
    assert sum(size for _, size in dc) == 60
    for rep, size in dc:
        assert size % h.order == 0


def test_subgroup_record_ranks_closed(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    ranks = h.ranks
    assert ranks.shape[0] == 12
    # closed under multiplication: spot-check all pairs
    rows = a5.table.rows_of(ranks)
    for i in range(12):
        prod = rows[np.arange(12), :][:, :]
        q = rows[i][rows]  # row_i applied then each
        assert a5.table.contains_rows(q).all()


def test_subgroup_conjugate(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    g = cyc(5, (0, 4, 3, 2, 1))
    hc = h.conjugate(g)
    assert hc.order == 12
    assert not np.array_equal(hc.ranks, h.ranks)
    # conjugating back restores
    assert np.array_equal(hc.conjugate(g.inverse()).ranks, h.ranks)


def test_generators_from_ranks(a5):
    h = a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))])
    rebuilt = a5.subgroup_from_ranks(h.ranks)
    gens = rebuilt.generators
    assert rebuilt.chain.order == 12
