"""Tests for the explicit constructions and counterexamples."""

import numpy as np
import pytest

from mindim import InputError
from mindim.constructions import (
    WitnessCertificate,
    aset_contains,
    aset_members_upto,
    naive_aset_contains,
    ortho_even_witness,
    ortho_odd_witness,
    sp4_witness,
)
from mindim.constructions.aset import is_prime_power


def test_aset_first_members():
    assert aset_members_upto(150) == [34, 46, 58, 86, 94, 106, 118, 134, 142, 146]


def test_aset_examples():
    assert aset_contains(34)
    assert not aset_contains(22)   # p = 11 excluded
    assert not aset_contains(26)   # 25 = 5^2 is a prime power
    assert not aset_contains(33)   # odd
    assert not aset_contains(0)


def test_aset_against_naive_oracle():
    for n in range(1, 2001):
        assert aset_contains(n) == naive_aset_contains(n), n


def test_is_prime_power():
    assert is_prime_power(27)
    assert is_prime_power(7)
    assert is_prime_power(1024)
    assert not is_prime_power(1)
    assert not is_prime_power(12)
    assert not is_prime_power(100)


@pytest.mark.parametrize("q", [5, 7])
def test_sp4_witness(q):
    cert = sp4_witness(q)
    assert cert.verdict
    assert cert.payload["stabilizer_order"] == 2  # {+I, -I}


def test_sp4_rejects_bad_q():
    with pytest.raises(InputError):
        sp4_witness(3)
    with pytest.raises(InputError):
        sp4_witness(4)


@pytest.mark.parametrize("n,q", [(7, 3), (9, 3)])
def test_ortho_odd_witness(n, q):
    cert = ortho_odd_witness(n, q)
    assert cert.verdict
    assert cert.payload["stabilizer_order"] == 1


def test_ortho_odd_regression_dimension():
    # solution-space dimension for the (9,3) system, recorded as a
    # regression value: small enough that 3^d stays far below budget
    cert = ortho_odd_witness(9, 3)
    assert cert.payload["solution_dim"] == 5


def test_ortho_odd_rejects_small_or_even():
    with pytest.raises(InputError):
        ortho_odd_witness(5, 3)
    with pytest.raises(InputError):
        ortho_odd_witness(7, 4)
    with pytest.raises(InputError):
        ortho_odd_witness(8, 3)


def test_lemma66_witness():
    cert = ortho_even_witness("lemma66", m=2, q=2)
    assert cert.verdict
    assert cert.payload["stabilizer_order"] == 1  # T_a with a in GF(2)* is I


def test_lemma66_q4_stabilizer_is_ta():
    cert = ortho_even_witness("lemma66", m=2, q=4)
    assert cert.verdict
    assert cert.payload["stabilizer_order"] == 3  # |GF(4)*| torus elements


def test_lemma66_rejects_identity_a():
    from mindim.gfq import eye, field_of_order

    ctx = field_of_order(2)
    with pytest.raises(InputError):
        ortho_even_witness("lemma66", m=2, q=2, a_mat=eye(ctx, 2))


def test_theorem68_witness():
    cert = ortho_even_witness("theorem68", n=10, q=2)
    assert cert.verdict
    assert cert.payload["stabilizer_order"] == 1
    assert ["swap matrix lies outside Omega", True] in cert.checks


def test_theorem68_rejects_composite_k():
    with pytest.raises(InputError):
        ortho_even_witness("theorem68", n=12, q=2)  # k = 6 not prime


def test_certificate_serialization_roundtrip():
    cert = sp4_witness(5)
    text = cert.to_json()
    back = WitnessCertificate.from_json(text)
    assert back.verdict == cert.verdict
    assert back.payload == cert.payload
    assert back.checks == cert.checks


def test_certificate_replay():
    from mindim.constructions import replay_certificate

    cert = ortho_odd_witness(7, 3)
    assert replay_certificate(WitnessCertificate.from_json(cert.to_json()))


class TestG2:
    @pytest.fixture(scope="class")
    def g2_q2(self):
        from mindim.constructions import g2_group

        return g2_group(2)

    def test_order(self, g2_q2):
        assert g2_q2.group_order == 12096  # G2(2), with G2(2)' of index 2

    def test_h_structure(self, g2_q2):
        assert g2_q2.h_order == 36  # SL2(2) x SL2(2)

    def test_intersection(self, g2_q2):
        assert g2_q2.intersection_order == 1

    def test_rejects_bad_q(self):
        from mindim.constructions import g2_group

        with pytest.raises(InputError):
            g2_group(3)
        with pytest.raises(InputError):
            g2_group(16)

    def test_commutator_table_self_check(self):
        from mindim.constructions.g2 import _verify_commutator_relations

        assert _verify_commutator_relations(4)

    def test_reversed_product_also_works(self):
        # sanity cross: the reversed reading of the conjugator product also
        # gives a trivial intersection at q = 2
        from mindim.constructions.g2 import root_element, _matrix_closure
        from mindim.gfq import field_of_order, minv, mmul

        ctx = field_of_order(2)
        g_rev = mmul(ctx, mmul(ctx, root_element(ctx, "-b", 1), root_element(ctx, "a+b", 1)),
                     root_element(ctx, "b", 1))
        f1 = _matrix_closure(ctx, [root_element(ctx, "3a+2b", 1), root_element(ctx, "-(3a+2b)", 1)], 7)
        f2 = _matrix_closure(ctx, [root_element(ctx, "a", 1), root_element(ctx, "-a", 1)], 7)
        h = {mmul(ctx, x, y).tobytes() for x in f1 for y in f2}
        assert len(h) == 36
        ginv = minv(ctx, g_rev)
        conj = {mmul(ctx, mmul(ctx, ginv, np.frombuffer(k, dtype=np.uint16).reshape(6, 6)), g_rev).tobytes()
                for k in h}
        assert len(h & conj) == 1


def test_gamma_smoke():
    # the full gamma run is exercised by the acceptance suite; here only the
    # group construction invariants up to the X-lift
    from mindim.constructions.gamma import _d8_perms, _triple_perm
    from mindim.permcore import GeneratedGroup, stabilizer_chain

    a, b = _d8_perms()
    assert a.order() == 4 and b.order() == 2
    assert (a * b).order() == 2  # abab = 1
    x1 = _triple_perm((a, b, b))
    x2 = _triple_perm((b, a * b, a))
    assert stabilizer_chain(GeneratedGroup(12, [x1, x2])).order == 32
