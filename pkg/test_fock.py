#!/usr/bin/env python3
"""
Tests for the truncated Fock-space realization
"""

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import CapacityError, OscillatorLookupError, TruncationRiskError
from fock import (
    FockRep,
    apply,
    commutator_matrix,
    ladder_matrix,
    lowering_matrix,
    occupation_state,
    proportional_to_identity,
    realize,
    restrict,
    self_adjoint_defect,
    truncation_defect,
    vacuum_vector,
    vev_numeric,
)
from opalgebra import (
    CommutatorScheme,
    LadderSymbol,
    OperatorPoly,
    a,
    ad,
    build_hamiltonian_sym,
    canonicalize_b,
    normal_order,
    random_poly,
    vev,
)

STANDARD = CommutatorScheme.standard()
PAPER = CommutatorScheme.paper()
SCHEMES = [STANDARD, PAPER, CommutatorScheme.custom(("-1", "1/2", "1/4", "1/4"))]


def test_lowering_matrix():
    np.testing.assert_allclose(lowering_matrix(2).toarray(), [[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]])


def test_dimension_and_cap():
    rep = FockRep.for_modes([0], PAPER, n_max=2)
    assert rep.dimension == 81
    assert rep.occupations.shape == (81, 4)
    with pytest.raises(CapacityError):
        FockRep.for_modes([0, 1, 2], PAPER, n_max=2)
    assert FockRep.for_modes([0, 1], PAPER, n_max=2, max_dimension=8192).dimension == 6561
    with pytest.raises(ValueError):
        FockRep.for_modes([0], PAPER, n_max=0)


def test_empty_representation():
    rep = FockRep([], PAPER)
    assert rep.dimension == 1
    assert vev_numeric(OperatorPoly.scalar(5), rep) == 5


def test_metric_signature():
    assert FockRep.for_modes([0], STANDARD).has_indefinite_metric
    assert FockRep.for_modes([0], STANDARD).is_indefinite(0)
    assert not FockRep.for_modes([0], PAPER).has_indefinite_metric


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.kind.value)
def test_truncation_defect(scheme):
    defect = truncation_defect(FockRep.for_modes([0], scheme, n_max=3))
    assert defect.sub_truncation <= 1e-12
    assert defect.full_space > 1.0
    assert defect.worst_oscillator is not None


@pytest.mark.parametrize("scheme, n_max, expected", [(STANDARD, 3, 4.0), (PAPER, 2, 1.0)],
                         ids=["c=1 n_max=3", "c=1/3 n_max=2"])
def test_truncation_defect_values(scheme, n_max, expected):
    # only the top occupation sees the cut: c * (n_max + 1)
    defect = truncation_defect(FockRep([(0, 1)], scheme, n_max=n_max))
    assert defect.full_space == pytest.approx(expected)
    assert defect.sub_truncation <= 1e-12
    assert defect.worst_oscillator == (0, 1)


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.kind.value)
def test_vacuum_is_annihilated(scheme):
    rep = FockRep.for_modes([0], scheme)
    vacuum = vacuum_vector(rep)
    assert vacuum[0] == 1
    for r in range(4):
        annihilator = LadderSymbol(0, r, not scheme.creator(r, 0).dagger)
        assert scheme.annihilates_vacuum(annihilator)
        assert np.linalg.norm(apply(OperatorPoly.symbol(annihilator), rep, vacuum)) == 0


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.kind.value)
def test_quadratic_vevs_match_exact(scheme):
    rep = FockRep.for_modes([0], scheme)
    for r in range(4):
        for word in (a(r) * ad(r), ad(r) * a(r)):
            assert vev_numeric(word, rep) == pytest.approx(complex(vev(word, scheme)), abs=1e-12)


def test_paper_vevs():
    rep = FockRep.for_modes([0], PAPER)
    assert vev_numeric(ad(0) * a(0), rep) == pytest.approx(1.0)
    assert vev_numeric(a(1) * ad(1), rep) == pytest.approx(1 / 3)
    assert vev_numeric(a(1) * a(1) * ad(1) * ad(1), rep) == pytest.approx(2 / 9)


@settings(derandomize=True, max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6), st.sampled_from(SCHEMES))
def test_random_vevs_match_exact(seed, scheme):
    p = random_poly(random.Random(seed), modes=(0,), max_degree=4)
    rep = FockRep.for_modes([0], scheme, n_max=2)
    assert abs(vev_numeric(p, rep) - complex(vev(p, scheme))) <= 1e-10


@settings(derandomize=True, max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_normal_order_preserves_matrices_on_safe_states(seed):
    p = random_poly(random.Random(seed), modes=(0,), max_degree=4)
    rep = FockRep.for_modes([0], PAPER, n_max=3)
    difference = realize(normal_order(p, PAPER), rep) - realize(p, rep)
    assert np.max(np.abs(restrict(difference, rep.safe_mask(p.degree))), initial=0.0) <= 1e-10


def test_truncation_risk():
    rep = FockRep.for_modes([0], PAPER, n_max=2)
    word = a(1) * a(1) * a(1) * ad(1) * ad(1) * ad(1)
    with pytest.raises(TruncationRiskError):
        vev_numeric(word, rep)
    assert vev_numeric(word, FockRep.for_modes([0], PAPER, n_max=3)) == pytest.approx(6 / 27)


def test_missing_oscillator():
    rep = FockRep.for_modes([0], PAPER)
    with pytest.raises(OscillatorLookupError):
        rep.ladder(LadderSymbol(1, 0))
    with pytest.raises(OscillatorLookupError):
        occupation_state(rep, {(1, 0): 1})


def test_safe_mask():
    rep = FockRep.for_modes([0], PAPER, n_max=2)
    assert rep.safe_mask(2).sum() == 2 ** 4
    assert rep.safe_mask(4).sum() == 1
    assert rep.safe_mask(4)[0]


def test_occupation_state_matches_creation():
    rep = FockRep.for_modes([0], PAPER)
    created = apply(ad(1), rep, rep.vacuum())
    np.testing.assert_allclose(created, np.sqrt(1 / 3) * occupation_state(rep, {(0, 1): 1}))
    created = apply(a(0), rep, rep.vacuum())
    np.testing.assert_allclose(created, occupation_state(rep, {(0, 0): 1}))


def test_commutator_is_identity_on_safe_states():
    rep = FockRep.for_modes([0], PAPER, n_max=2)
    matrix = realize(a(1) * ad(1) - ad(1) * a(1), rep)
    is_identity, value = proportional_to_identity(matrix, rep.safe_mask(2))
    assert is_identity
    assert value == pytest.approx(1 / 3)
    is_identity, _ = proportional_to_identity(matrix, np.ones(rep.dimension, dtype=bool))
    assert not is_identity


@pytest.mark.parametrize("scheme", SCHEMES, ids=lambda s: s.kind.value)
def test_hamiltonian_is_self_adjoint(scheme):
    rep = FockRep.for_modes([0], scheme)
    h = realize(build_hamiltonian_sym([(0, 1)]), rep)
    assert self_adjoint_defect(h, rep) <= 1e-12
    assert self_adjoint_defect(realize(a(1), rep), rep) > 0.1


def test_ladder_matrix_commutator():
    rep = FockRep.for_modes([0], PAPER, n_max=2)
    lower = ladder_matrix(LadderSymbol(0, 2), rep)
    assert lower is rep.ladder(LadderSymbol(0, 2))
    bracket = commutator_matrix(lower, ladder_matrix(LadderSymbol(0, 2, True), rep))
    is_identity, value = proportional_to_identity(bracket, rep.safe_mask(2))
    assert is_identity
    assert value == pytest.approx(1 / 3)


weights = st.integers(min_value=1, max_value=20)


@settings(derandomize=True, max_examples=20, deadline=None)
@given(st.tuples(weights, weights, weights))
def test_realized_b_operators_are_canonical(w):
    scheme = CommutatorScheme.paper(tuple(Fraction(v, sum(w)) for v in w))
    sub = canonicalize_b(scheme)
    rep = FockRep.for_modes([0], scheme, n_max=2)
    mask = rep.safe_mask(2)
    for r in range(4):
        for s in range(4):
            b = realize(sub.b_operator(r), rep)
            b_dagger = realize(sub.b_operator(s, dagger=True), rep)
            is_multiple, value = proportional_to_identity(commutator_matrix(b, b_dagger), mask)
            assert is_multiple
            assert value == pytest.approx(1.0 if r == s else 0.0, abs=1e-12)


@settings(derandomize=True, max_examples=20, deadline=None)
@given(st.tuples(weights, weights, weights),
       st.lists(st.tuples(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=7)),
                min_size=1, max_size=3))
def test_vacuum_energy_numeric_oracle(w, frequencies):
    scheme = CommutatorScheme.paper(tuple(Fraction(v, sum(w)) for v in w))
    h = build_hamiltonian_sym([(i, Fraction(num, den)) for i, (num, den) in enumerate(frequencies)])
    for target, expected in ((scheme, 0.0), (STANDARD, sum(2 * num / den for num, den in frequencies))):
        rep = FockRep.for_modes(range(len(frequencies)), target, n_max=1)
        assert vev_numeric(h, rep) == pytest.approx(expected, abs=1e-12)
