#!/usr/bin/env python3
"""
Mode-expanded photon field in a periodic box.

    A^mu(x) = sum_k sum_r sqrt(hbar c^2 / 2 V w) eps_r^mu(k) [a_r(k) e^{-ikx} + a_r^+(k) e^{ikx}]

with kx = w t - k.x, k = 2 pi m / L for integer 3-vectors m != 0 and w = c|k|.
The ladder symbol for mode m uses the position of m in the ModeSet as its
mode index, so a ModeSet and a FockRep built with FockRep.for_modes(range(len(ms)))
line up.

Matrices come from a FockRep; exact operators (Hamiltonian, momentum) are
OperatorPolys with sympy coefficients.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps
import sympy as sp

from errors import AliasingError, InvalidModeError, OscillatorLookupError, SymmetryRequiredError
from fock import FockRep, apply, commutator_matrix, proportional_to_identity, restrict
from opalgebra import (
    XI,
    CommutatorScheme,
    LadderSymbol,
    OperatorPoly,
    build_hamiltonian_sym,
    excitation_eigenvalue,
    exact,
    normal_order_prescription,
    vev,
)
from polarization import METRIC, PolarizationBasis, build_basis, polarization_weight

logger = logging.getLogger(__name__)

COMMUTATOR_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: Fraction = Fraction(1)
    c: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("hbar", "c"):
            value = Fraction(getattr(self, name))
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class FieldPoint:
    t: float = 0.0
    x: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if len(x) != 3 or not np.all(np.isfinite(x)) or not np.isfinite(self.t):
            raise ValueError(f"Field point needs finite t and 3 finite x components, got {self.t!r}, {self.x!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class ModeSet:
    """Finite set of periodic-box wavevectors k = 2 pi m / L"""

    L: Any
    modes: Tuple[Tuple[int, int, int], ...]
    _bases: Dict[int, PolarizationBasis] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        length = exact(self.L)
        if not bool(length > 0):
            raise InvalidModeError(f"Box length must be positive, got {self.L}")
        object.__setattr__(self, "L", length)

        modes = []
        for m in self.modes:
            m = tuple(int(v) for v in m)
            if len(m) != 3:
                raise InvalidModeError(f"Mode must be an integer 3-vector, got {m}")
            if m == (0, 0, 0):
                raise InvalidModeError("Zero wavevector has w = 0 and is excluded")
            if m in modes:
                raise InvalidModeError(f"Duplicate mode {m}")
            modes.append(m)
        if not modes:
            raise InvalidModeError("Mode set is empty")
        object.__setattr__(self, "modes", tuple(modes))

    @classmethod
    def from_string(cls, L: Any, text: str) -> "ModeSet":
        """'0,0,1;0,0,-1' -> modes (0,0,1) and (0,0,-1)"""
        try:
            modes = [tuple(int(v) for v in chunk.split(",")) for chunk in text.split(";") if chunk.strip()]
        except ValueError as e:
            raise InvalidModeError(f"Cannot parse mode list {text!r}: {e}")
        return cls(L, tuple(modes))

    @classmethod
    def symmetric_closure(cls, L: Any, modes: Sequence[Sequence[int]]) -> "ModeSet":
        closed: List[Tuple[int, int, int]] = []
        for m in modes:
            for v in (tuple(m), tuple(-x for x in m)):
                if v not in closed:
                    closed.append(v)
        return cls(L, tuple(closed))

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def indices(self) -> range:
        return range(len(self.modes))

    @property
    def symmetric(self) -> bool:
        present = set(self.modes)
        return all(tuple(-v for v in m) in present for m in self.modes)

    @property
    def volume(self) -> sp.Expr:
        return self.L ** 3

    @property
    def max_component(self) -> int:
        return max(abs(v) for m in self.modes for v in m)

    def wavevector(self, i: int) -> np.ndarray:
        return 2 * np.pi * np.array(self.modes[i], dtype=float) / float(self.L)

    def wavevector_exact(self, i: int) -> Tuple[sp.Expr, sp.Expr, sp.Expr]:
        return tuple(2 * sp.pi * v / self.L for v in self.modes[i])

    def omega_exact(self, i: int, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> sp.Expr:
        m = self.modes[i]
        return 2 * sp.pi * exact(consts.c) * sp.sqrt(sum(v * v for v in m)) / self.L

    def omega(self, i: int, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
        return float(consts.c) * float(np.linalg.norm(self.wavevector(i)))

    def basis(self, i: int) -> PolarizationBasis:
        if i not in self._bases:
            k = self.wavevector(i)
            self._bases[i] = build_basis(k / np.linalg.norm(k))
        return self._bases[i]


def _amplitude(ms: ModeSet, i: int, consts: PhysicalConstants) -> float:
    omega = ms.omega(i, consts)
    return float(np.sqrt(float(consts.hbar) * float(consts.c) ** 2 / (2 * float(ms.volume) * omega)))


def _symbols(ms: ModeSet) -> List[LadderSymbol]:
    return [LadderSymbol(i, r, dagger) for i in ms.indices for r in range(4) for dagger in (False, True)]


def _expansion(ms: ModeSet, consts: PhysicalConstants, t: float, xs: np.ndarray,
               derivative: Optional[int] = None) -> Tuple[List[LadderSymbol], np.ndarray]:
    """Coefficients of A^mu (or a derivative of it) on each ladder symbol.

    derivative None -> A, -1 -> d/dt, j in 0..2 -> d/dx_j.
    Returns the symbol list and an array of shape (symbols, 4, points).
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    symbols = _symbols(ms)
    table = np.empty((len(symbols), 4, xs.shape[0]), dtype=complex)
    for n, sym in enumerate(symbols):
        k = ms.wavevector(sym.mode)
        omega = ms.omega(sym.mode, consts)
        sign = 1.0 if sym.dagger else -1.0
        phase = np.exp(sign * 1j * (omega * t - xs @ k))
        if derivative is None:
            factor = 1.0
        elif derivative == -1:
            factor = sign * 1j * omega
        else:
            factor = -sign * 1j * k[derivative]
        eps = ms.basis(sym.mode).eps[sym.pol].to_array()
        table[n] = _amplitude(ms, sym.mode, consts) * factor * np.outer(eps, phase)
    return symbols, table


def _check_coverage(ms: ModeSet, rep: FockRep):
    missing = [(i, r) for i in ms.indices for r in range(4) if (i, r) not in rep._index]
    if missing:
        raise OscillatorLookupError(f"FockRep lacks oscillators {missing[:4]} for this mode set")


def _combine(symbols: Sequence[LadderSymbol], coefficients: np.ndarray, rep: FockRep) -> sps.csr_matrix:
    total = sps.csr_matrix((rep.dimension, rep.dimension), dtype=complex)
    for sym, coeff in zip(symbols, coefficients):
        if coeff != 0:
            total = total + coeff * rep.ladder(sym)
    return total


def field_operator(mu: int, p: FieldPoint, ms: ModeSet, rep: FockRep,
                   consts: PhysicalConstants = DEFAULT_CONSTANTS) -> sps.csr_matrix:
    _check_coverage(ms, rep)
    symbols, table = _expansion(ms, consts, p.t, np.array([p.x]))
    return _combine(symbols, table[:, mu, 0], rep)


def field_time_derivative(mu: int, p: FieldPoint, ms: ModeSet, rep: FockRep,
                          consts: PhysicalConstants = DEFAULT_CONSTANTS) -> sps.csr_matrix:
    _check_coverage(ms, rep)
    symbols, table = _expansion(ms, consts, p.t, np.array([p.x]), derivative=-1)
    return _combine(symbols, table[:, mu, 0], rep)


def momentum_density(mu: int, p: FieldPoint, ms: ModeSet, rep: FockRep,
                     consts: PhysicalConstants = DEFAULT_CONSTANTS) -> sps.csr_matrix:
    """pi_mu = -(1/c^2) dA_mu/dt, index lowered with g"""
    factor = -METRIC[mu, mu] / float(consts.c) ** 2
    return factor * field_time_derivative(mu, p, ms, rep, consts)


def delta_partial_sum(dx: Sequence[float], ms: ModeSet) -> complex:
    """delta_V(dx) = (1/V) sum_k e^{i k.dx}"""
    dx = np.asarray(dx, dtype=float)
    total = sum(np.exp(1j * ms.wavevector(i) @ dx) for i in ms.indices)
    return complex(total / float(ms.volume))


def expected_equal_time_constant(mu: int, nu: int, x: Sequence[float], x_prime: Sequence[float],
                                 ms: ModeSet, scheme: CommutatorScheme,
                                 consts: PhysicalConstants = DEFAULT_CONSTANTS) -> complex:
    """-g_nu_nu i hbar (1/V) sum_k K^{mu nu}(k) e^{i k.(x - x')} on a symmetric set"""
    dx = np.asarray(x, dtype=float) - np.asarray(x_prime, dtype=float)
    constants = [float(v) for v in scheme.c]
    total = 0j
    for i in ms.indices:
        weight = polarization_weight(ms.basis(i), constants)[mu, nu]
        total += weight * np.exp(1j * ms.wavevector(i) @ dx)
    return complex(-METRIC[nu, nu] * 1j * float(consts.hbar) * total / float(ms.volume))


class EqualTimeCommutator(NamedTuple):
    matrix: sps.csr_matrix
    c_number: complex
    is_c_number: bool


def equal_time_commutator(mu: int, nu: int, x: Sequence[float], x_prime: Sequence[float], t: float,
                          ms: ModeSet, rep: FockRep, consts: PhysicalConstants = DEFAULT_CONSTANTS,
                          tolerance: float = COMMUTATOR_TOLERANCE) -> EqualTimeCommutator:
    """[A^mu(x, t), pi_nu(x', t)], judged on the sub-truncation subspace"""
    if not ms.symmetric:
        raise SymmetryRequiredError("Equal-time commutator needs a mode set closed under m -> -m")
    field_a = field_operator(mu, FieldPoint(t, tuple(x)), ms, rep, consts)
    pi_b = momentum_density(nu, FieldPoint(t, tuple(x_prime)), ms, rep, consts)
    matrix = commutator_matrix(field_a, pi_b)
    is_c_number, value = proportional_to_identity(matrix, rep.safe_mask(2), tolerance)
    logger.debug(f"[A^{mu}, pi_{nu}] = {value:.6g} (c-number: {is_c_number})")
    return EqualTimeCommutator(matrix, value, is_c_number)


def equal_time_field_commutator(mu: int, nu: int, x: Sequence[float], x_prime: Sequence[float], t: float,
                                ms: ModeSet, rep: FockRep,
                                consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """max |entry| of [A^mu(x, t), A^nu(x', t)] on the sub-truncation subspace"""
    if not ms.symmetric:
        raise SymmetryRequiredError("Field commutator cancellation needs a mode set closed under m -> -m")
    first = field_operator(mu, FieldPoint(t, tuple(x)), ms, rep, consts)
    second = field_operator(nu, FieldPoint(t, tuple(x_prime)), ms, rep, consts)
    block = restrict(commutator_matrix(first, second), rep.safe_mask(2))
    return float(np.max(np.abs(block), initial=0.0))


def field_commutator_tensor(p: FieldPoint, p_prime: FieldPoint, ms: ModeSet, scheme: CommutatorScheme,
                            consts: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """c-number [A^mu(x), A^nu(x')] at unequal times, 4x4.

    sum_k (hbar c^2 / 2 V w) K^{mu nu}(k) (e^{-ik(x-x')} - e^{ik(x-x')})
    with the polarization weight K kept inside the sum.
    """
    dt = p.t - p_prime.t
    dx = np.asarray(p.x) - np.asarray(p_prime.x)
    constants = [float(v) for v in scheme.c]
    tensor = np.zeros((4, 4), dtype=complex)
    for i in ms.indices:
        phase = ms.omega(i, consts) * dt - ms.wavevector(i) @ dx
        weight = polarization_weight(ms.basis(i), constants)
        tensor += _amplitude(ms, i, consts) ** 2 * weight * (-2j * np.sin(phase))
    return tensor


def hamiltonian_modes(ms: ModeSet, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> OperatorPoly:
    return build_hamiltonian_sym([(i, ms.omega_exact(i, consts)) for i in ms.indices], hbar=consts.hbar)


def hamiltonian_from_density(ms: ModeSet, rep: FockRep, grid_n: int,
                             consts: PhysicalConstants = DEFAULT_CONSTANTS, t: float = 0.0) -> sps.csr_matrix:
    """Integrate -1/2 sum_mu g_mu_mu [(1/c^2)(dA^mu/dt)^2 + sum_i (d_i A^mu)^2] over the box.

    Each derivative field is linear in the ladder matrices X_j, so the
    integral is sum_jl G_jl X_j X_l with G summed on a uniform periodic grid.
    The rule is exact for integrands band-limited below the grid Nyquist.
    """
    needed = 2 * ms.max_component + 2
    if grid_n < needed:
        raise AliasingError(f"grid_n = {grid_n} aliases modes with |m_i| <= {ms.max_component}; need >= {needed}")
    _check_coverage(ms, rep)

    length = float(ms.L)
    axis = np.arange(grid_n) * length / grid_n
    xs = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    cell = length ** 3 / grid_n ** 3
    c2 = float(consts.c) ** 2

    symbols = _symbols(ms)
    gram = np.zeros((len(symbols), len(symbols)), dtype=complex)
    for derivative, scale in [(-1, 1.0 / c2), (0, 1.0), (1, 1.0), (2, 1.0)]:
        _, table = _expansion(ms, consts, t, xs, derivative)
        for mu in range(4):
            values = table[:, mu, :]
            gram += (-0.5 * METRIC[mu, mu] * scale * cell) * (values @ values.T)

    cutoff = 1e-14 * float(np.max(np.abs(gram)))
    total = sps.csr_matrix((rep.dimension, rep.dimension), dtype=complex)
    for j, l in zip(*np.nonzero(np.abs(gram) > cutoff)):
        total = total + gram[j, l] * (rep.ladder(symbols[j]) @ rep.ladder(symbols[l]))
    logger.debug(f"Density Hamiltonian: grid {grid_n}^3, {np.count_nonzero(np.abs(gram) > cutoff)} ladder products")
    return total.tocsr()


def momentum_operator(ms: ModeSet, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> Tuple[OperatorPoly, ...]:
    """P^i = sum_{k, r} (hbar k^i / 2) xi_r (a_r^+ a_r + a_r a_r^+)"""
    hbar = exact(consts.hbar)
    components = []
    for axis in range(3):
        terms: Dict[Tuple[LadderSymbol, ...], sp.Expr] = {}
        for i in ms.indices:
            k_i = ms.wavevector_exact(i)[axis]
            if k_i == 0:
                continue
            for r in range(4):
                lower = LadderSymbol(i, r, False)
                upper = LadderSymbol(i, r, True)
                for word in ((upper, lower), (lower, upper)):
                    terms[word] = terms.get(word, sp.S.Zero) + hbar * k_i * XI[r] / 2
        components.append(OperatorPoly(terms))
    return tuple(components)


def check_energy_momentum_identity(state: OperatorPoly, ms: ModeSet, rep: FockRep,
                                   consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """|| (c^2 |P|^2 - H^2) state|0> ||, with the state given by its creating polynomial"""
    psi = apply(state, rep, rep.vacuum())
    hamiltonian = hamiltonian_modes(ms, consts)
    h_psi = apply(hamiltonian, rep, apply(hamiltonian, rep, psi))
    p_psi = np.zeros(rep.dimension, dtype=complex)
    for component in momentum_operator(ms, consts):
        if not component.is_zero():
            p_psi += apply(component, rep, apply(component, rep, psi))
    residual = float(np.linalg.norm(float(consts.c) ** 2 * p_psi - h_psi))
    logger.debug(f"Energy-momentum residual {residual:.3e}")
    return residual


def vacuum_energy(ms: ModeSet, scheme: CommutatorScheme, consts: PhysicalConstants = DEFAULT_CONSTANTS,
                  normal_ordered: bool = False) -> sp.Expr:
    """Exact <0|H|0>; normal_ordered applies the N[.] prescription first"""
    hamiltonian = hamiltonian_modes(ms, consts)
    if normal_ordered:
        hamiltonian = normal_order_prescription(hamiltonian)
    return sp.simplify(vev(hamiltonian, scheme))


def single_photon_energies(ms: ModeSet, scheme: CommutatorScheme,
                           consts: PhysicalConstants = DEFAULT_CONSTANTS) -> Dict[Tuple[int, int], sp.Expr]:
    """Energy carried by one quantum of each (mode, pol): lambda in [H, creator] = lambda creator"""
    hamiltonian = hamiltonian_modes(ms, consts)
    energies = {}
    for i in ms.indices:
        for r in range(4):
            energies[(i, r)] = sp.simplify(excitation_eigenvalue(hamiltonian, scheme.creator(r, i), scheme))
    return energies
