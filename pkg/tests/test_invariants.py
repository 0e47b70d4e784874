"""Tests for Mindim/alpha/beta/Maxdim on hand-built collections."""

import numpy as np
import pytest

from mindim import GeneratedGroup, InputError, Permutation
from mindim.groupanalysis import GroupContext
from mindim.invariants import (
    MaximalCollection,
    alpha,
    beta,
    compute_invariants,
    is_irredundant,
    maxdim,
    maxdim_lower_bound_from_base_witness,
    mindim,
    minmax_compare,
    popcount,
    ranks_to_bits,
)


def cyc(degree, *cycles):
    return Permutation.from_cycles(degree, cycles)


@pytest.fixture(scope="module")
def a5():
    return GroupContext(GeneratedGroup(5, [cyc(5, (0, 1, 2, 3, 4)), cyc(5, (0, 1, 2))], label="A5"))


@pytest.fixture(scope="module")
def a5_coll(a5):
    reps = [
        a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))], tags=["A4"]),
        a5.subgroup([cyc(5, (0, 1, 2, 3, 4)), cyc(5, (1, 4), (2, 3))], tags=["D10"]),
        a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (0, 1), (3, 4))], tags=["S3"]),
    ]
    return MaximalCollection(a5, reps, complete=True)


@pytest.fixture(scope="module")
def s3_ctx():
    return GroupContext(GeneratedGroup(3, [cyc(3, (0, 1, 2)), cyc(3, (0, 1))], label="S3"))


@pytest.fixture(scope="module")
def s3_coll(s3_ctx):
    reps = [
        s3_ctx.subgroup([cyc(3, (0, 1, 2))], tags=["C3"]),
        s3_ctx.subgroup([cyc(3, (0, 1))], tags=["C2"]),
    ]
    return MaximalCollection(s3_ctx, reps, complete=True, self_normalizing=False)


def test_bitset_roundtrip():
    ranks = np.array([0, 5, 63, 64, 100], dtype=np.uint32)
    bits = ranks_to_bits(ranks, 128)
    assert popcount(bits) == 5


def test_collection_expansion_counts(a5, a5_coll):
    expanded = a5_coll.expand()
    assert len(expanded) == 5 + 6 + 10
    assert a5_coll.verify_primitivity()


def test_expansion_detects_wrong_class(a5):
    # A3 inside A5 is not maximal: primitivity certificate must fail
    reps = [a5.subgroup([cyc(5, (0, 1, 2))], tags=["A3"])]
    coll = MaximalCollection(a5, reps, complete=True, self_normalizing=False)
    with pytest.raises(InputError):
        coll.verify_primitivity()


def test_is_irredundant(a5, a5_coll):
    expanded = a5_coll.expand()
    a4 = expanded[0]
    # conjugate A4s intersect in order 3: each alone has order 12
    other = next(m for m in expanded[1:5] if m.order == 12)
    assert is_irredundant([a4, other])
    assert not is_irredundant([a4, a4])


def test_frattini_trivial_a5(a5_coll):
    assert a5_coll.frattini_subgroup().order == 1


def test_alpha_a5(a5, a5_coll):
    res = alpha(a5, a5_coll)
    assert res.value == 2


def test_beta_a5(a5, a5_coll):
    val, ci, witness = beta(a5, a5_coll)
    assert val == 2
    assert witness.replay(a5, a5_coll.class_reps[ci])


def test_mindim_a5(a5, a5_coll):
    res = mindim(a5, a5_coll)
    assert res.value == 2


def test_maxdim_a5(a5, a5_coll):
    res = maxdim(a5, a5_coll)
    assert res.value == 3  # Maxdim(A_n) = n - 2


def test_minmax_a5(a5, a5_coll):
    assert minmax_compare(mindim(a5, a5_coll), maxdim(a5, a5_coll)) == "holds"


def test_invariant_report_a5(a5, a5_coll):
    report = compute_invariants(a5, a5_coll, with_maxdim=True)
    assert (report.mindim.value, report.alpha.value, report.beta_value) == (2, 2, 2)
    assert report.maxdim.value == 3
    assert report.check_chain()


def test_s3_mindim_maxdim(s3_ctx, s3_coll):
    # the two-reflection set is maximal irredundant: Mindim(S3) = Maxdim(S3) = 2
    res = mindim(s3_ctx, s3_coll)
    assert res.value == 2
    resx = maxdim(s3_ctx, s3_coll)
    assert resx.value == 2
    assert minmax_compare(res, resx) == "fails"  # S3 is minmax


def test_c4_mindim_one():
    c4 = GroupContext(GeneratedGroup(4, [cyc(4, (0, 1, 2, 3))], label="C4"))
    reps = [c4.subgroup([cyc(4, (0, 2), (1, 3))], tags=["C2"])]
    coll = MaximalCollection(c4, reps, complete=True, self_normalizing=False)
    res = mindim(c4, coll)
    assert res.value == 1
    assert coll.frattini_subgroup().order == 2


def test_maxdim_witness_from_base(a5, a5_coll):
    from mindim.basebounds import base_size

    a4 = a5_coll.class_reps[0]
    b, witness = base_size(a5, a4)
    assert b == 3
    assert maxdim_lower_bound_from_base_witness(a5, a4, witness) == 3


def test_alpha_refuses_incomplete(a5):
    reps = [a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))], tags=["A4"])]
    coll = MaximalCollection(a5, reps, complete=False)
    with pytest.raises(InputError):
        alpha(a5, coll)


def test_conjugated_collection_same_invariants(a5, a5_coll):
    # rerun with every representative conjugated: values must not change
    g = cyc(5, (0, 3, 1, 4, 2))
    reps = [a5.subgroup([p.conjugate(g) for p in rep.generators], tags=list(rep.tags))
            for rep in a5_coll.class_reps]
    coll2 = MaximalCollection(a5, reps, complete=True)
    assert alpha(a5, coll2).value == alpha(a5, a5_coll).value
    assert mindim(a5, coll2).value == mindim(a5, a5_coll).value
