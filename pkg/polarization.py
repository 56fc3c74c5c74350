#!/usr/bin/env python3
"""
Minkowski four-vectors and the real polarization tetrad of a photon mode.

Signature is (+, -, -, -). For a propagation direction khat the tetrad is
eps_0 = (1, 0, 0, 0) and eps_r = (0, e_r) for r = 1, 2, 3, where e_1, e_2 are
transverse and e_3 = khat. The metric signs are xi = (-1, +1, +1, +1).
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from errors import InvalidDirectionError

logger = logging.getLogger(__name__)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
XI = (-1, 1, 1, 1)
UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FourVector:
    """Contravariant four-vector; index 0 is the time component"""

    components: Tuple[float, float, float, float]

    def __post_init__(self):
        values = tuple(float(v) for v in self.components)
        if len(values) != 4:
            raise ValueError(f"Four-vector needs 4 components, got {len(values)}")
        if not all(np.isfinite(values)):
            raise ValueError(f"Four-vector components must be finite: {values}")
        object.__setattr__(self, "components", values)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "FourVector":
        return cls(tuple(values))

    def to_array(self) -> np.ndarray:
        return np.array(self.components, dtype=float)

    @property
    def spatial(self) -> np.ndarray:
        return np.array(self.components[1:], dtype=float)


def minkowski_dot(u: FourVector, v: FourVector) -> float:
    """u^0 v^0 - u^1 v^1 - u^2 v^2 - u^3 v^3"""
    return float(u.to_array() @ METRIC @ v.to_array())


def lower_index(u: FourVector) -> FourVector:
    """Covariant components u_mu = g_mu_nu u^nu"""
    return FourVector.from_array(METRIC @ u.to_array())


@dataclass(frozen=True)
class PolarizationBasis:
    """Polarization tetrad for one propagation direction"""

    eps: Tuple[FourVector, FourVector, FourVector, FourVector]
    khat: Tuple[float, float, float]
    xi: Tuple[int, int, int, int] = XI

    def matrix(self) -> np.ndarray:
        """4x4 array, row r holds eps_r^mu"""
        return np.array([e.to_array() for e in self.eps])

    def with_vector(self, r: int, vector: FourVector) -> "PolarizationBasis":
        eps = list(self.eps)
        eps[r] = vector
        return PolarizationBasis(tuple(eps), self.khat, self.xi)


def _tangent(khat: np.ndarray) -> np.ndarray:
    # coordinate axis least aligned with khat; first index wins ties
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(khat)))] = 1.0
    tangent = axis - (axis @ khat) * khat
    return tangent / np.linalg.norm(tangent)


def build_basis(khat: Sequence[float]) -> PolarizationBasis:
    """Build the tetrad for a unit propagation direction.

    e_1 is the least-aligned coordinate axis Gram-Schmidt'ed against khat,
    e_2 = khat x e_1 and e_3 = khat, so (e_1, e_2, e_3) is right-handed.
    The construction is deterministic: equal inputs give identical bases.
    """
    k = np.asarray(khat, dtype=float)
    if k.shape != (3,) or not np.all(np.isfinite(k)):
        raise InvalidDirectionError(f"Direction must be a finite 3-vector, got {khat!r}")
    norm = float(np.linalg.norm(k))
    if abs(norm - 1.0) > UNIT_TOLERANCE:
        raise InvalidDirectionError(f"Direction must be a unit vector, |khat| = {norm!r}")

    e1 = _tangent(k)
    e2 = np.cross(k, e1)
    eps = (
        FourVector((1.0, 0.0, 0.0, 0.0)),
        FourVector((0.0, *e1)),
        FourVector((0.0, *e2)),
        FourVector((0.0, *k)),
    )
    return PolarizationBasis(eps=eps, khat=tuple(float(v) for v in k))


def check_orthonormality(basis: PolarizationBasis) -> float:
    """max over r, s of |eps_r . eps_s + xi_r delta_rs|"""
    eps = basis.matrix()
    gram = eps @ METRIC @ eps.T
    deviation = gram + np.diag(np.array(basis.xi, dtype=float))
    return float(np.max(np.abs(deviation)))


def check_completeness(basis: PolarizationBasis) -> float:
    """max over mu, nu of |sum_r xi_r eps_r^mu eps_r^nu + g^{mu nu}|"""
    eps = basis.matrix()
    total = eps.T @ np.diag(np.array(basis.xi, dtype=float)) @ eps
    return float(np.max(np.abs(total + METRIC)))


def polarization_weight(basis: PolarizationBasis, constants: Sequence[float]) -> np.ndarray:
    """K^{mu nu} = sum_r c_r eps_r^mu eps_r^nu for per-polarization constants c_r"""
    eps = basis.matrix()
    return eps.T @ np.diag(np.asarray(constants, dtype=float)) @ eps
