import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import parse_product, random_sequence, random_state, scramble
from mfrf import zoo
from mfrf.classify import (
    THREE_QUBIT_REPRESENTATIVES,
    canonical_representative,
    classify_three_qubit,
    schmidt_number,
    slice_algebra,
    slocc_equivalent,
    verify_certificate,
    verify_witness,
)
from mfrf.exactnum import ONE, as_exact, root_of_unity
from mfrf.state import DimMismatch, from_terms


def ket(dims, *labels):
    return from_terms(dims, [(tuple(int(c) for c in s), ONE) for s in labels])


def test_schmidt_number_examples():
    assert schmidt_number(zoo.ghz(3), [1]) == 2
    assert schmidt_number(ket((2, 2), "00"), [1]) == 1
    geo = zoo.hankel_state(4, 2, [as_exact(3) ** k for k in range(5)])
    assert schmidt_number(geo, [1]) == 1
    assert schmidt_number(zoo.hypergraph_named("MU"), [1, 2]) == 2


def test_classify_examples():
    assert classify_three_qubit(zoo.ghz(3)) == "GHZ"
    assert classify_three_qubit(zoo.w(3)) == "W"
    assert classify_three_qubit(ket((2, 2, 2), "000", "011")) == "BISEP_A_BC"
    assert classify_three_qubit(ket((2, 2, 2), "000", "101")) == "BISEP_B_AC"
    assert classify_three_qubit(ket((2, 2, 2), "000", "110")) == "BISEP_C_AB"
    assert classify_three_qubit(ket((2, 2, 2), "101")) == "PRODUCT"


def test_classify_wrong_dims():
    with pytest.raises(DimMismatch):
        classify_three_qubit(zoo.ghz(3, 3))


@pytest.mark.parametrize("label", sorted(THREE_QUBIT_REPRESENTATIVES))
def test_classifier_constant_on_orbits(label):
    rng = random.Random(label)
    rep = THREE_QUBIT_REPRESENTATIVES[label]
    for _ in range(10):
        x, _ = scramble(rep, rng, 15, gaussian=True)
        res = classify_three_qubit(x, with_result=True)
        assert res.label == label
        assert verify_certificate(x, canonical_representative(label), res.certificate)


def test_ghz_w_inequivalent_with_witness():
    v = slocc_equivalent(zoo.ghz(3), zoo.w(3))
    assert v.kind == "inequivalent"
    assert v.witness.kind in ("site_ranks", "slice_algebra")
    assert verify_witness(zoo.ghz(3), zoo.w(3), v.witness)


def test_lme_equivalent_to_ghz():
    a, b = zoo.lme_elementary(4, root_of_unity(4, 1)), zoo.ghz(4)
    v = slocc_equivalent(a, b)
    assert v.equivalent and verify_certificate(a, b, v.certificate)


def test_scrambled_copy_is_equivalent():
    rng = random.Random(4)
    s = random_state(rng, (2, 3, 2))
    x, _ = scramble(s, rng, 15)
    v = slocc_equivalent(s, x)
    assert v.equivalent and verify_certificate(s, x, v.certificate)


def test_site_rank_witness():
    a, b = zoo.ghz(3), ket((2, 2, 2), "000", "011")
    v = slocc_equivalent(a, b)
    assert v.kind == "inequivalent" and v.witness.kind == "site_ranks"
    assert verify_witness(a, b, v.witness)
    assert not verify_witness(a, a, v.witness)


def test_dim_mismatch():
    with pytest.raises(DimMismatch):
        slocc_equivalent(zoo.ghz(3), zoo.ghz(4))


def test_verify_certificate_examples():
    v1, mu = zoo.hypergraph_named("V1"), zoo.hypergraph_named("MU")
    assert verify_certificate(v1, mu, parse_product("L3(1,1,0)L4(0,-1,1)"))
    rng = random.Random(0)
    g, w = zoo.ghz(3), zoo.w(3)
    for _ in range(20):
        assert not verify_certificate(g, w, random_sequence(rng, g.dims, 8))
    assert verify_certificate(w, w, [])


def test_slice_algebra_values():
    # GHZ: diagonal algebra, semisimple; W: one nilpotent direction
    assert slice_algebra(zoo.ghz(3), 1, 2) == (2, 2)
    assert slice_algebra(zoo.w(3), 1, 2) == (2, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_slice_algebra_is_invariant(seed):
    rng = random.Random(seed)
    for s in (zoo.ghz(3), zoo.w(3), zoo.h4_reduced_form(), zoo.ghz(3, 3)):
        x, _ = scramble(s, rng, 12)
        assert slice_algebra(x, 1, 2) == slice_algebra(s, 1, 2)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=2, max_size=4), st.integers(0, 10**6))
def test_rank_vector_invariant(dims, seed):
    rng = random.Random(seed)
    s = random_state(rng, tuple(dims))
    x, _ = scramble(s, rng, 15)
    assert x.site_ranks() == s.site_ranks()
