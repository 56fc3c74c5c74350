#!/usr/bin/env python3
"""
Truncated Fock-space realization of the ladder algebra.

Every (mode, pol) oscillator keeps occupations 0..n_max; the full space is
their tensor product. How a pair is realized depends on the scheme:

  c > 0, a annihilates |0>          a = sqrt(c) L,    a+ = a^H
  c < 0, a+ annihilates |0>         a = sqrt(|c|) R,  a+ = a^H      (role swap)
  c < 0, a annihilates |0>          a = sqrt(|c|) L,  a+ = eta a^H eta

with L the textbook lowering matrix, R = L^T and eta = (-1)^occupation the
indefinite metric. The same eta formula also covers c > 0 with a swapped role.
[a, a+] = c holds exactly on states whose occupations stay below n_max.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
import scipy.sparse as sps

from errors import CapacityError, OscillatorLookupError, TruncationRiskError
from opalgebra import CommutatorScheme, LadderSymbol, OperatorPoly, Role

logger = logging.getLogger(__name__)

DEFAULT_MAX_DIMENSION = 4096


def lowering_matrix(n_max: int) -> sps.csr_matrix:
    """sqrt(1), ..., sqrt(n_max) on the superdiagonal"""
    entries = np.sqrt(np.arange(1, n_max + 1, dtype=float))
    return sps.csr_matrix(sps.diags(entries, 1, shape=(n_max + 1, n_max + 1)))


class FockRep:
    """Truncated multi-oscillator Fock space for one commutator scheme.

    Immutable after construction; ladder matrices are built lazily and cached.
    """

    def __init__(self, oscillators: Iterable[Tuple[int, int]], scheme: CommutatorScheme,
                 n_max: int = 2, max_dimension: int = DEFAULT_MAX_DIMENSION):
        if n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {n_max}")
        self.n_max = int(n_max)
        self.oscillators: Tuple[Tuple[int, int], ...] = tuple(dict.fromkeys(tuple(o) for o in oscillators))
        self.scheme = scheme
        self.max_dimension = int(max_dimension)

        self.dimension = (self.n_max + 1) ** len(self.oscillators)
        if self.dimension > self.max_dimension:
            raise CapacityError(
                f"Fock dimension {self.dimension} = {self.n_max + 1}^{len(self.oscillators)} "
                f"exceeds cap {self.max_dimension}"
            )
        self._index = {osc: i for i, osc in enumerate(self.oscillators)}
        self._shape = (self.n_max + 1,) * len(self.oscillators)
        if self.oscillators:
            self.occupations = np.array(np.unravel_index(np.arange(self.dimension), self._shape)).T
        else:
            self.occupations = np.zeros((1, 0), dtype=int)

        signs = np.ones(self.dimension)
        for osc, j in self._index.items():
            if self.is_indefinite(osc[1]):
                signs *= (-1.0) ** self.occupations[:, j]
        self.metric = signs
        self._eta = sps.diags(signs).tocsr()
        self._ladder_cache: Dict[LadderSymbol, sps.csr_matrix] = {}

        logger.debug(f"FockRep: {len(self.oscillators)} oscillators, n_max={self.n_max}, "
                     f"dimension={self.dimension}, indefinite={self.has_indefinite_metric}")

    @classmethod
    def for_modes(cls, modes: Iterable[int], scheme: CommutatorScheme, n_max: int = 2,
                  max_dimension: int = DEFAULT_MAX_DIMENSION) -> "FockRep":
        oscillators = [(m, r) for m in modes for r in range(4)]
        return cls(oscillators, scheme, n_max, max_dimension)

    @classmethod
    def for_poly(cls, p: OperatorPoly, scheme: CommutatorScheme, n_max: int = 2,
                 max_dimension: int = DEFAULT_MAX_DIMENSION) -> "FockRep":
        return cls(sorted(p.oscillators()), scheme, n_max, max_dimension)

    def is_indefinite(self, pol: int) -> bool:
        positive = (self.scheme.c[pol] > 0) == (self.scheme.roles[pol] is Role.OPERATOR)
        return not positive

    @property
    def has_indefinite_metric(self) -> bool:
        return bool(np.any(self.metric < 0))

    def identity(self) -> sps.csr_matrix:
        return sps.identity(self.dimension, dtype=complex, format="csr")

    def _embed(self, local: sps.spmatrix, position: int) -> sps.csr_matrix:
        size = self.n_max + 1
        before = sps.identity(size ** position, format="csr")
        after = sps.identity(size ** (len(self.oscillators) - position - 1), format="csr")
        return sps.kron(sps.kron(before, local), after, format="csr")

    def ladder(self, sym: LadderSymbol) -> sps.csr_matrix:
        cached = self._ladder_cache.get(sym)
        if cached is not None:
            return cached
        if sym.oscillator not in self._index:
            raise OscillatorLookupError(f"No oscillator {sym.oscillator} in this representation")

        c = float(self.scheme.c[sym.pol])
        base = lowering_matrix(self.n_max)
        if self.scheme.roles[sym.pol] is Role.CONJUGATE:
            base = base.T.tocsr()
        op = (np.sqrt(abs(c)) * self._embed(base, self._index[sym.oscillator])).astype(complex)
        conj = (self._eta @ op.conj().T @ self._eta).tocsr()

        self._ladder_cache[LadderSymbol(sym.mode, sym.pol, False)] = op
        self._ladder_cache[LadderSymbol(sym.mode, sym.pol, True)] = conj
        return conj if sym.dagger else op

    def vacuum(self) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=complex)
        vec[0] = 1.0
        return vec

    def safe_mask(self, degree: int = 2) -> np.ndarray:
        """States no word of this degree can push past n_max"""
        limit = self.n_max - int(np.ceil(degree / 2))
        return np.all(self.occupations <= limit, axis=1)

    def sub_truncation_mask(self) -> np.ndarray:
        return self.safe_mask(2)

    def __repr__(self) -> str:
        return (f"FockRep(oscillators={len(self.oscillators)}, n_max={self.n_max}, "
                f"dimension={self.dimension}, scheme={self.scheme.kind.value})")


def ladder_matrix(sym: LadderSymbol, rep: FockRep) -> sps.csr_matrix:
    return rep.ladder(sym)


def vacuum_vector(rep: FockRep) -> np.ndarray:
    return rep.vacuum()


def realize(p: OperatorPoly, rep: FockRep) -> sps.csr_matrix:
    """Matrix image of p: products -> matrix products, identity word -> identity"""
    total = sps.csr_matrix((rep.dimension, rep.dimension), dtype=complex)
    for word, coeff in p.terms.items():
        term = rep.identity()
        for sym in word:
            term = term @ rep.ladder(sym)
        total = total + complex(coeff) * term
    return total.tocsr()


def apply(p: OperatorPoly, rep: FockRep, vector: np.ndarray) -> np.ndarray:
    """p|vector>, applying each word right to left"""
    result = np.zeros(rep.dimension, dtype=complex)
    for word, coeff in p.terms.items():
        state = np.asarray(vector, dtype=complex)
        for sym in reversed(word):
            state = rep.ladder(sym) @ state
        result += complex(coeff) * state
    return result


def vev_numeric(p: OperatorPoly, rep: FockRep) -> complex:
    """<0|p|0> in the truncated space"""
    if p.degree > 2 * rep.n_max:
        raise TruncationRiskError(
            f"Degree {p.degree} exceeds 2*n_max = {2 * rep.n_max}; the vacuum element could be truncated")
    # the vacuum has eta = +1, so the metric does not enter
    return complex(apply(p, rep, rep.vacuum())[0])


def restrict(matrix: sps.spmatrix, mask: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(mask)
    return sps.csr_matrix(matrix)[idx][:, idx].toarray()


@dataclass(frozen=True)
class TruncationDefect:
    sub_truncation: float
    full_space: float
    worst_oscillator: Optional[Tuple[int, int]] = None


def truncation_defect(rep: FockRep) -> TruncationDefect:
    """max |([a, a+] - c_r 1)_ij| per oscillator, inside and outside the safe subspace"""
    mask = rep.sub_truncation_mask()
    sub_worst = 0.0
    full_worst = 0.0
    worst = None
    for mode, pol in rep.oscillators:
        op = rep.ladder(LadderSymbol(mode, pol, False))
        conj = rep.ladder(LadderSymbol(mode, pol, True))
        defect = commutator_matrix(op, conj) - float(rep.scheme.c[pol]) * rep.identity()
        full = float(np.max(np.abs(defect.toarray()))) if defect.nnz else 0.0
        sub = float(np.max(np.abs(restrict(defect, mask)), initial=0.0))
        sub_worst = max(sub_worst, sub)
        if full > full_worst:
            full_worst, worst = full, (mode, pol)
    return TruncationDefect(sub_truncation=sub_worst, full_space=full_worst, worst_oscillator=worst)


def adjoint_matrix(matrix: sps.spmatrix, rep: FockRep) -> sps.csr_matrix:
    """Adjoint under rep's inner product: eta M^H eta"""
    return (rep._eta @ sps.csr_matrix(matrix).conj().T @ rep._eta).tocsr()


def self_adjoint_defect(matrix: sps.spmatrix, rep: FockRep) -> float:
    diff = sps.csr_matrix(matrix) - adjoint_matrix(matrix, rep)
    return float(np.max(np.abs(diff.data), initial=0.0))


def commutator_matrix(x: sps.spmatrix, y: sps.spmatrix) -> sps.csr_matrix:
    return (x @ y - y @ x).tocsr()


def proportional_to_identity(matrix: sps.spmatrix, mask: np.ndarray,
                             tolerance: float = 1e-10) -> Tuple[bool, complex]:
    """Whether the masked block is lambda * 1, and lambda"""
    block = restrict(matrix, mask)
    if block.size == 0:
        return True, 0j
    value = complex(np.mean(np.diag(block)))
    residual = float(np.max(np.abs(block - value * np.eye(block.shape[0]))))
    return residual <= tolerance, value


def occupation_state(rep: FockRep, occupations: Dict[Tuple[int, int], int]) -> np.ndarray:
    """Basis vector with the given occupations (others zero)"""
    occ = [0] * len(rep.oscillators)
    for osc, count in occupations.items():
        if osc not in rep._index:
            raise OscillatorLookupError(f"No oscillator {osc} in this representation")
        occ[rep._index[osc]] = count
    index = int(np.ravel_multi_index(tuple(occ), rep._shape)) if occ else 0
    vec = np.zeros(rep.dimension, dtype=complex)
    vec[index] = 1.0
    return vec
