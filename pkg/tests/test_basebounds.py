"""Tests for base sizes, criteria, fixed point ratios and Q-hat."""

from fractions import Fraction

import numpy as np
import pytest

from mindim import GeneratedGroup, InputError, Permutation
from mindim.basebounds import (
    ActionContext,
    base_size,
    brute_force_base_size,
    fpr,
    intersection_criteria,
    monte_carlo_nonbase_estimate,
    qhat,
    regular_orbit_witness,
)
from mindim.groupanalysis import GroupContext, double_cosets, subgroup_intersection


def cyc(degree, *cycles):
    return Permutation.from_cycles(degree, cycles)


@pytest.fixture(scope="module")
def a5():
    return GroupContext(GeneratedGroup(5, [cyc(5, (0, 1, 2, 3, 4)), cyc(5, (0, 1, 2))], label="A5"))


@pytest.fixture(scope="module")
def a4(a5):
    return a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (1, 2, 3))], tags=["A4"])


@pytest.fixture(scope="module")
def s3(a5):
    return a5.subgroup([cyc(5, (0, 1, 2)), cyc(5, (0, 1), (3, 4))], tags=["S3"])


def test_regular_orbit_s3_pair(a5, s3):
    g, lengths = regular_orbit_witness(a5, s3, s3)
    assert 6 in lengths
    assert g is not None
    meet = subgroup_intersection(s3, s3.conjugate(g))
    assert meet.order == 1


def test_regular_orbit_a4_none(a5, a4):
    g, lengths = regular_orbit_witness(a5, a4, a4)
    assert g is None
    assert lengths == [1, 4]


def test_base_size_a5_a4(a5, a4):
    b, witness = base_size(a5, a4)
    assert b == 3
    assert witness.replay(a5, a4)
    assert len(witness.conjugators) == 2


def test_base_size_a5_s3(a5, s3):
    b, witness = base_size(a5, s3)
    assert b == 2
    assert witness.replay(a5, s3)


def test_base_size_normal_subgroup():
    c4 = GroupContext(GeneratedGroup(4, [cyc(4, (0, 1, 2, 3))], label="C4"))
    h = c4.subgroup([cyc(4, (0, 2), (1, 3))])
    b, witness = base_size(c4, h)
    assert b == 1


def test_base_size_rejects_whole_group(a5):
    g = a5.subgroup(a5.group.generators)
    with pytest.raises(InputError):
        base_size(a5, g)


def test_brute_force_agrees(a5, a4, s3):
    assert brute_force_base_size(a5, a4) == base_size(a5, a4)[0]
    assert brute_force_base_size(a5, s3) == base_size(a5, s3)[0]
    d10 = a5.subgroup([cyc(5, (0, 1, 2, 3, 4)), cyc(5, (1, 4), (2, 3))], tags=["D10"])
    assert brute_force_base_size(a5, d10) == base_size(a5, d10)[0]


def test_criteria_order_mode(a5, a4, s3):
    cert = intersection_criteria(a5, a4, a4, mode="order")
    assert cert.verdict  # 144 > 60, consistent with b(A5, A4) > 2
    cert = intersection_criteria(a5, s3, s3, mode="order")
    assert not cert.verdict  # 36 < 60


def test_criteria_double_coset_mode(a5, a4):
    reps = [rep for rep, _ in double_cosets(a5, a4, a4)]
    cert = intersection_criteria(a5, a4, a4, mode="double_coset", reps=reps)
    assert cert.verdict
    assert sorted(cert.double_coset_sizes) == [12, 48]


def test_criteria_double_coset_rejects_duplicates(a5, a4):
    reps = [rep for rep, _ in double_cosets(a5, a4, a4)]
    with pytest.raises(InputError):
        intersection_criteria(a5, a4, a4, mode="double_coset", reps=[reps[0], reps[0]])


def test_fpr_three_cycle(a5, a4):
    val = fpr(a5, a4, cyc(5, (0, 1, 2)))
    assert val.value == Fraction(2, 5)
    assert (val.fixed_points, val.class_size, val.class_meet_h) == (2, 20, 8)


def test_fpr_five_cycle_zero(a5, a4):
    val = fpr(a5, a4, cyc(5, (0, 1, 2, 3, 4)))
    assert val.value == 0


def test_fpr_involution(a5, a4):
    val = fpr(a5, a4, cyc(5, (0, 1), (2, 3)))
    assert val.value == Fraction(1, 5)


def test_fpr_rejects_composite_order():
    s4 = GroupContext(GeneratedGroup(4, [cyc(4, (0, 1, 2, 3)), cyc(4, (0, 1))], label="S4"))
    h = s4.subgroup([cyc(4, (0, 1, 2)), cyc(4, (0, 1))])
    with pytest.raises(InputError):
        fpr(s4, h, cyc(4, (0, 1, 2, 3)))  # order 4 is not prime


def test_qhat_a5_a4(a5, a4):
    assert qhat(a5, a4, 2) == Fraction(19, 5)
    assert qhat(a5, a4, 4) == Fraction(67, 125)


def test_qhat_implies_base_bound(a5, a4):
    # Q-hat < 1 at c = 4 certifies b <= 4; measured b = 3
    assert qhat(a5, a4, 4) < 1
    assert base_size(a5, a4)[0] <= 4


def test_qhat_rejects_whole_group(a5):
    g = a5.subgroup(a5.group.generators)
    with pytest.raises(InputError):
        qhat(a5, g, 2)


def test_monte_carlo_exact_pairs(a5, a4):
    # every pair of points in the natural A5 action has nontrivial stabilizer
    est = monte_carlo_nonbase_estimate(a5, a4, 2, trials=2000, seed=99)
    assert est.frequency == 1


def test_monte_carlo_c4_matches_enumeration(a5, a4):
    # exact non-base probability for 4-tuples: tuples meeting <= 2 points
    # (5 + 10 * (2^4 - 2)) / 5^4 = 29/125
    est = monte_carlo_nonbase_estimate(a5, a4, 4, trials=20000, seed=7)
    exact = Fraction(29, 125)
    assert abs(est.frequency - exact) < Fraction(2, 100)
    q4 = qhat(a5, a4, 4)
    sigma = float(q4 * (1 - q4) / 20000) ** 0.5 if q4 < 1 else 0.0
    assert float(est.frequency) <= float(q4) + 3 * sigma


def test_monte_carlo_reproducible(a5, a4):
    est1 = monte_carlo_nonbase_estimate(a5, a4, 3, trials=500, seed=5)
    est2 = monte_carlo_nonbase_estimate(a5, a4, 3, trials=500, seed=5)
    assert est1.hits == est2.hits


def test_information_bound(a5, a4, s3):
    import math

    for h in (a4, s3):
        b, _ = base_size(a5, h)
        n = a5.order // h.order
        assert b >= math.log(a5.order) / math.log(n)
