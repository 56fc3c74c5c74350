#!/usr/bin/env python3
"""
Tests for the polarization tetrad and Minkowski helpers
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import InvalidDirectionError
from polarization import (
    METRIC,
    XI,
    FourVector,
    build_basis,
    check_completeness,
    check_orthonormality,
    lower_index,
    minkowski_dot,
    polarization_weight,
)

component = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
directions = (
    st.tuples(component, component, component)
    .filter(lambda v: np.linalg.norm(v) > 0.1)
    .map(lambda v: tuple(np.asarray(v) / np.linalg.norm(v)))
)


@settings(derandomize=True, max_examples=200)
@given(directions)
def test_tetrad_is_orthonormal_and_complete(khat):
    basis = build_basis(khat)
    assert check_orthonormality(basis) <= 1e-12
    assert check_completeness(basis) <= 1e-12


@settings(derandomize=True, max_examples=100)
@given(directions)
def test_tetrad_is_right_handed_along_khat(khat):
    basis = build_basis(khat)
    spatial = np.array([e.spatial for e in basis.eps[1:]])
    np.testing.assert_allclose(spatial[2], khat, atol=1e-15)
    assert np.linalg.det(spatial) == pytest.approx(1.0, abs=1e-12)
    assert basis.eps[0].components == (1.0, 0.0, 0.0, 0.0)


def test_basis_is_deterministic():
    khat = (0.0, 0.6, 0.8)
    assert build_basis(khat) == build_basis(khat)


def test_z_direction_basis():
    basis = build_basis((0.0, 0.0, 1.0))
    np.testing.assert_allclose(basis.matrix(), np.eye(4), atol=1e-15)


@pytest.mark.parametrize("khat", [(0.0, 0.0, 0.0), (1.0, 1.0, 0.0), (0.5, 0.0, 0.0), (np.nan, 0.0, 1.0), (1.0, 0.0)])
def test_invalid_direction(khat):
    with pytest.raises(InvalidDirectionError):
        build_basis(khat)


def test_perturbed_basis_fails_orthonormality():
    basis = build_basis((0.0, 0.0, 1.0))
    broken = basis.with_vector(1, FourVector((0.0, 1.1, 0.0, 0.0)))
    assert check_orthonormality(broken) == pytest.approx(0.21)
    assert check_completeness(broken) > 0.2


def test_minkowski_signature():
    t = FourVector((1.0, 0.0, 0.0, 0.0))
    x = FourVector((0.0, 1.0, 0.0, 0.0))
    assert minkowski_dot(t, t) == 1.0
    assert minkowski_dot(x, x) == -1.0
    assert minkowski_dot(t, x) == 0.0
    assert lower_index(FourVector((2.0, 1.0, -3.0, 4.0))).components == (2.0, -1.0, 3.0, -4.0)


def test_four_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        FourVector((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        FourVector((1.0, 2.0, np.inf, 0.0))


def test_polarization_weight_with_metric_signs_is_minus_g():
    basis = build_basis((0.6, 0.0, 0.8))
    np.testing.assert_allclose(polarization_weight(basis, XI), -METRIC, atol=1e-12)


def test_polarization_weight_transverse_trace():
    basis = build_basis((0.0, 0.6, 0.8))
    weight = polarization_weight(basis, (-1, 0.5, 0.25, 0.25))
    assert weight[0, 0] == pytest.approx(-1.0)
    assert np.trace(weight[1:, 1:]) == pytest.approx(1.0)
    np.testing.assert_allclose(weight, weight.T, atol=1e-15)
