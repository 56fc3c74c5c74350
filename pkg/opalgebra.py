#!/usr/bin/env python3
"""
Exact symbolic algebra of photon ladder operators.

An OperatorPoly is a finite sum of words of ladder symbols with exact sympy
coefficients. A CommutatorScheme fixes [a_r(k), a_r^+(k)] = c_r and which of
a_r, a_r^+ annihilates the vacuum; normal ordering, commutators and vacuum
expectation values are all taken relative to a scheme.

Two schemes matter:
  standard  c = (-1, 1, 1, 1), a_r annihilates the vacuum for every r
  paper     c = (-1, n1, n2, n3) with n1 + n2 + n3 = 1, and a_0^+ (not a_0)
            annihilates the vacuum for the scalar photon
"""

import heapq
import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from errors import InvalidModeError, NonPositiveNormError, SchemeError, SchemeTypeError, WorkbenchError

logger = logging.getLogger(__name__)

XI = (-1, 1, 1, 1)
POLARIZATIONS = (0, 1, 2, 3)


def exact(value: Any) -> sp.Expr:
    """Convert a number to an exact sympy value.

    Floats and decimal strings are taken by place value ("0.1" -> 1/10),
    so no binary rounding leaks into the algebra.
    """
    if isinstance(value, sp.Basic):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, (int, np.integer)):
        return sp.Integer(int(value))
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"Coefficient must be finite, got {value!r}")
        return sp.Rational(repr(float(value)))
    if isinstance(value, (complex, np.complexfloating)):
        return exact(value.real) + sp.I * exact(value.imag)
    if isinstance(value, str):
        return sp.Rational(value.strip())
    raise TypeError(f"Cannot use {type(value).__name__} as an exact coefficient")


class Role(Enum):
    """Which member of a conjugate pair annihilates the vacuum"""

    OPERATOR = "operator"
    CONJUGATE = "conjugate"


class SchemeKind(Enum):
    STANDARD = "standard"
    PAPER = "paper"
    CUSTOM = "custom"
    CANONICAL = "canonical"


@dataclass(frozen=True, order=True)
class LadderSymbol:
    """a_pol(mode), or a_pol^+(mode) when dagger is set"""

    mode: int
    pol: int
    dagger: bool = False

    def __post_init__(self):
        if self.pol not in POLARIZATIONS:
            raise ValueError(f"Polarization must be 0..3, got {self.pol}")
        if self.mode < 0:
            raise ValueError(f"Mode index must be >= 0, got {self.mode}")

    @property
    def oscillator(self) -> Tuple[int, int]:
        return (self.mode, self.pol)

    def conjugate(self) -> "LadderSymbol":
        return LadderSymbol(self.mode, self.pol, not self.dagger)


Word = Tuple[LadderSymbol, ...]


class OperatorPoly:
    """Immutable noncommutative polynomial in ladder symbols.

    Terms map words to nonzero exact coefficients; the empty word is the
    identity operator.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Iterable[LadderSymbol], Any]] = None):
        collected: Dict[Word, sp.Expr] = {}
        for word, coeff in (terms or {}).items():
            key = tuple(word)
            collected[key] = collected.get(key, sp.S.Zero) + exact(coeff)
        cleaned = {}
        for word, coeff in collected.items():
            coeff = sp.expand(coeff)
            if coeff != 0:
                cleaned[word] = coeff
        self._terms = MappingProxyType(cleaned)

    @classmethod
    def identity(cls) -> "OperatorPoly":
        return cls({(): 1})

    @classmethod
    def scalar(cls, value: Any) -> "OperatorPoly":
        return cls({(): value})

    @classmethod
    def zero(cls) -> "OperatorPoly":
        return cls()

    @classmethod
    def symbol(cls, sym: LadderSymbol, coeff: Any = 1) -> "OperatorPoly":
        return cls({(sym,): coeff})

    @property
    def terms(self) -> Mapping[Word, sp.Expr]:
        return self._terms

    @property
    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, word: Iterable[LadderSymbol]) -> sp.Expr:
        return self._terms.get(tuple(word), sp.S.Zero)

    def constant_term(self) -> sp.Expr:
        return self.coefficient(())

    def symbols(self) -> set:
        return {s for word in self._terms for s in word}

    def oscillators(self) -> set:
        return {s.oscillator for s in self.symbols()}

    def _coerce(self, other: Any) -> "OperatorPoly":
        if isinstance(other, OperatorPoly):
            return other
        return OperatorPoly.scalar(other)

    def __add__(self, other: Any) -> "OperatorPoly":
        other = self._coerce(other)
        merged: Dict[Word, sp.Expr] = dict(self._terms)
        for word, coeff in other.terms.items():
            merged[word] = merged.get(word, sp.S.Zero) + coeff
        return OperatorPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> "OperatorPoly":
        return OperatorPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: Any) -> "OperatorPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "OperatorPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "OperatorPoly":
        if not isinstance(other, OperatorPoly):
            factor = exact(other)
            return OperatorPoly({w: factor * c for w, c in self._terms.items()})
        return multiply(self, other)

    def __rmul__(self, other: Any) -> "OperatorPoly":
        factor = exact(other)
        return OperatorPoly({w: factor * c for w, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperatorPoly):
            try:
                other = OperatorPoly.scalar(other)
            except (TypeError, ValueError):
                return NotImplemented
        return dict(self._terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        from exprdsl import format as format_poly

        return f"OperatorPoly({format_poly(self)!r})"


def a(pol: int, mode: int = 0) -> OperatorPoly:
    return OperatorPoly.symbol(LadderSymbol(mode, pol, False))


def ad(pol: int, mode: int = 0) -> OperatorPoly:
    return OperatorPoly.symbol(LadderSymbol(mode, pol, True))


def multiply(p: OperatorPoly, q: OperatorPoly) -> OperatorPoly:
    """Formal product; words are concatenated, nothing is reordered"""
    product: Dict[Word, sp.Expr] = {}
    for wp, cp in p.terms.items():
        for wq, cq in q.terms.items():
            word = wp + wq
            product[word] = product.get(word, sp.S.Zero) + cp * cq
    return OperatorPoly(product)


def adjoint(p: OperatorPoly) -> OperatorPoly:
    """Formal adjoint: reversed words, flipped daggers, conjugated coefficients"""
    return OperatorPoly({
        tuple(s.conjugate() for s in reversed(word)): sp.conjugate(coeff)
        for word, coeff in p.terms.items()
    })


@dataclass(frozen=True)
class CommutatorScheme:
    """Per-polarization commutator constants and vacuum roles.

    [a_r(k), a_r^+(k')] = c[r] delta_kk'; all other pairs commute. The
    constants do not depend on the mode.
    """

    c: Tuple[sp.Rational, sp.Rational, sp.Rational, sp.Rational]
    roles: Tuple[Role, Role, Role, Role]
    kind: SchemeKind = SchemeKind.CUSTOM

    def __post_init__(self):
        if len(self.c) != 4 or len(self.roles) != 4:
            raise SchemeError("A scheme needs exactly 4 constants and 4 roles")
        constants = tuple(sp.Rational(exact(v)) for v in self.c)
        for r, value in enumerate(constants):
            if value == 0:
                raise SchemeError(f"Commutator constant c_{r} must be nonzero")
        object.__setattr__(self, "c", constants)
        object.__setattr__(self, "roles", tuple(Role(r) for r in self.roles))

    @classmethod
    def standard(cls) -> "CommutatorScheme":
        return cls(c=XI, roles=(Role.OPERATOR,) * 4, kind=SchemeKind.STANDARD)

    @classmethod
    def paper(cls, n: Sequence[Any] = (Fraction(1, 3),) * 3) -> "CommutatorScheme":
        if len(n) != 3:
            raise SchemeError(f"Need three transverse/longitudinal weights, got {len(n)}")
        weights = tuple(sp.Rational(exact(v)) for v in n)
        for r, value in enumerate(weights, start=1):
            if value <= 0:
                raise NonPositiveNormError(f"n_{r} = {value} must be positive")
        if sum(weights) != 1:
            raise SchemeError(f"n_1 + n_2 + n_3 must equal 1, got {sum(weights)}")
        return cls(
            c=(sp.Integer(-1),) + weights,
            roles=(Role.CONJUGATE, Role.OPERATOR, Role.OPERATOR, Role.OPERATOR),
            kind=SchemeKind.PAPER,
        )

    @classmethod
    def custom(cls, c: Sequence[Any], roles: Optional[Sequence[Any]] = None) -> "CommutatorScheme":
        """Arbitrary constants; by default negative constants get the swapped role"""
        constants = tuple(sp.Rational(exact(v)) for v in c)
        if roles is None:
            roles = tuple(Role.CONJUGATE if v < 0 else Role.OPERATOR for v in constants)
        return cls(c=constants, roles=tuple(roles), kind=SchemeKind.CUSTOM)

    @classmethod
    def canonical(cls) -> "CommutatorScheme":
        """Unit constants, a_r annihilates the vacuum: the b-operator algebra"""
        return cls(c=(1, 1, 1, 1), roles=(Role.OPERATOR,) * 4, kind=SchemeKind.CANONICAL)

    @property
    def n(self) -> Tuple[sp.Rational, sp.Rational, sp.Rational]:
        return self.c[1:]

    @property
    def is_role_swapped(self) -> bool:
        """Scalar photon swapped, the other three in the usual role"""
        return (self.c[0] < 0 and self.roles[0] is Role.CONJUGATE
                and all(role is Role.OPERATOR for role in self.roles[1:]))

    def annihilates_vacuum(self, sym: LadderSymbol) -> bool:
        if self.roles[sym.pol] is Role.OPERATOR:
            return not sym.dagger
        return sym.dagger

    def creator(self, pol: int, mode: int) -> LadderSymbol:
        """The member of the pair that creates an excitation"""
        return LadderSymbol(mode, pol, self.roles[pol] is Role.OPERATOR)

    def bracket(self, x: LadderSymbol, y: LadderSymbol) -> sp.Expr:
        """c-number value of [x, y] for two ladder symbols"""
        if x.oscillator != y.oscillator or x.dagger == y.dagger:
            return sp.S.Zero
        value = self.c[x.pol]
        return -value if x.dagger else value

    def describe(self) -> str:
        constants = ", ".join(str(v) for v in self.c)
        roles = ", ".join(role.value for role in self.roles)
        return f"{self.kind.value} c=({constants}) roles=({roles})"


def _order_key(sym: LadderSymbol, scheme: CommutatorScheme) -> Tuple[int, int, int]:
    return (1 if scheme.annihilates_vacuum(sym) else 0, sym.mode, sym.pol)


def _inversions(keys: Sequence[Tuple[int, int, int]], position: Optional[int] = None) -> int:
    """Out-of-order pairs in keys, or only those involving one position"""
    if position is None:
        return sum(1 for i in range(len(keys)) for j in range(i + 1, len(keys)) if keys[i] > keys[j])
    key = keys[position]
    return (sum(1 for other in keys[:position] if other > key)
            + sum(1 for other in keys[position + 1:] if key > other))


@lru_cache(maxsize=1 << 16)
def _normal_form(word: Word, scheme: CommutatorScheme) -> Tuple[Tuple[Word, sp.Expr], ...]:
    """Swap-and-contract on a worklist.

    Every rewrite lowers (length, inversions), so words are popped from the
    heap in decreasing order of that pair and each is expanded exactly once,
    after all of its contributions have been collected.
    """
    pending: Dict[Word, sp.Expr] = {word: sp.S.One}
    heap = [(-len(word), -_inversions([_order_key(s, scheme) for s in word]), word)]
    ordered: Dict[Word, sp.Expr] = {}

    def push(child: Word, coeff: sp.Expr, inversions: int) -> None:
        if child in pending:
            pending[child] += coeff
        else:
            pending[child] = coeff
            heapq.heappush(heap, (-len(child), -inversions, child))

    while heap:
        _, negative_inversions, current = heapq.heappop(heap)
        coeff = sp.expand(pending.pop(current))
        if coeff == 0:
            continue
        keys = [_order_key(s, scheme) for s in current]
        for i in range(len(current) - 1):
            if keys[i] <= keys[i + 1]:
                continue
            inversions = -negative_inversions
            x, y = current[i], current[i + 1]
            push(current[:i] + (y, x) + current[i + 2:], coeff, inversions - 1)
            bracket = scheme.bracket(x, y)
            if bracket != 0:
                # the (x, y) pair is counted once from each side
                removed = _inversions(keys, i) + _inversions(keys, i + 1) - 1
                push(current[:i] + current[i + 2:], bracket * coeff, inversions - removed)
            break
        else:
            ordered[current] = coeff
    return tuple(ordered.items())


def normal_order(p: OperatorPoly, scheme: CommutatorScheme) -> OperatorPoly:
    """Equality-preserving rewrite into the scheme's normal form.

    Vacuum-annihilating symbols move right of their conjugates using
    [x, y] = c repeatedly; within each side symbols sort by (mode, pol).
    The result is unique for a given input and scheme.
    """
    result: Dict[Word, sp.Expr] = {}
    for word, coeff in p.terms.items():
        for w, c in _normal_form(word, scheme):
            result[w] = result.get(w, sp.S.Zero) + coeff * c
    return OperatorPoly(result)


def normal_order_prescription(p: OperatorPoly) -> OperatorPoly:
    """Textbook N[.]: daggered symbols to the left, commutator terms dropped.

    Not equality-preserving and blind to vacuum roles.
    """
    return OperatorPoly({
        tuple(sorted(word, key=lambda s: (0 if s.dagger else 1, s.mode, s.pol))): coeff
        for word, coeff in p.terms.items()
    })


def commutator(p: OperatorPoly, q: OperatorPoly, scheme: CommutatorScheme) -> OperatorPoly:
    return normal_order(p * q - q * p, scheme)


def vev(p: OperatorPoly, scheme: CommutatorScheme) -> sp.Expr:
    """<0|p|0>: identity coefficient of the normal form"""
    return normal_order(p, scheme).constant_term()


def excitation_eigenvalue(op: OperatorPoly, creator: LadderSymbol, scheme: CommutatorScheme) -> sp.Expr:
    """lambda with [op, creator] = lambda * creator.

    When op annihilates the vacuum this is the eigenvalue of op on the
    one-quantum state creator|0>.
    """
    bracket = commutator(op, OperatorPoly.symbol(creator), scheme)
    if bracket.is_zero():
        return sp.S.Zero
    if set(bracket.terms) != {(creator,)}:
        raise WorkbenchError(f"[op, {creator}] is not proportional to {creator}")
    return bracket.coefficient((creator,))


@dataclass(frozen=True)
class BSubstitution:
    """Rescaled operators with unit commutators.

    For r = 1, 2, 3: a_r = f_r b_r with f_r = sqrt(n_r).
    For r = 0 the roles are relabelled: a_0 = f_0 b_0^+, a_0^+ = f_0 b_0
    with f_0 = sqrt(|c_0|), so b_0 annihilates the vacuum.
    Every b pair then obeys [b_r, b_r^+] = 1 (the canonical scheme).
    """

    factors: Tuple[sp.Expr, sp.Expr, sp.Expr, sp.Expr]
    swapped: Tuple[bool, bool, bool, bool]
    b_scheme: CommutatorScheme

    def b_operator(self, pol: int, mode: int = 0, dagger: bool = False) -> OperatorPoly:
        """b_pol(mode) (or its adjoint) written in terms of the a operators"""
        source = LadderSymbol(mode, pol, dagger != self.swapped[pol])
        return OperatorPoly.symbol(source, 1 / self.factors[pol])

    def substitute(self, p: OperatorPoly) -> OperatorPoly:
        """Rewrite an a-polynomial in b symbols (read under b_scheme)"""
        result: Dict[Word, sp.Expr] = {}
        for word, coeff in p.terms.items():
            factor = coeff
            new_word = []
            for sym in word:
                factor = factor * self.factors[sym.pol]
                new_word.append(LadderSymbol(sym.mode, sym.pol, sym.dagger != self.swapped[sym.pol]))
            key = tuple(new_word)
            result[key] = result.get(key, sp.S.Zero) + factor
        return OperatorPoly(result)

    def mapping(self) -> Dict[Tuple[int, bool], Tuple[sp.Expr, int, bool]]:
        """(pol, dagger) of a -> (factor, pol, dagger) of b"""
        return {
            (pol, dagger): (self.factors[pol], pol, dagger != self.swapped[pol])
            for pol in POLARIZATIONS
            for dagger in (False, True)
        }


def canonicalize_b(scheme: CommutatorScheme) -> BSubstitution:
    if scheme.kind is SchemeKind.STANDARD or not scheme.is_role_swapped:
        raise SchemeTypeError(f"b-operator rescaling needs a role-swapped scheme, got {scheme.describe()}")
    for r in (1, 2, 3):
        if scheme.c[r] <= 0:
            raise NonPositiveNormError(f"n_{r} = {scheme.c[r]} must be positive")
    factors = (sp.sqrt(-scheme.c[0]),) + tuple(sp.sqrt(v) for v in scheme.c[1:])
    return BSubstitution(factors=factors, swapped=(True, False, False, False),
                         b_scheme=CommutatorScheme.canonical())


def build_hamiltonian_sym(modes: Sequence[Tuple[int, Any]], hbar: Any = 1) -> OperatorPoly:
    """sum_k sum_r (hbar w / 2) xi_r [a_r^+ a_r + a_r a_r^+], scheme independent"""
    hbar = exact(hbar)
    terms: Dict[Word, sp.Expr] = {}
    for mode, omega in modes:
        omega = exact(omega)
        if not bool(omega > 0):
            raise InvalidModeError(f"Mode {mode} has non-positive frequency {omega}")
        for r in POLARIZATIONS:
            coeff = hbar * omega * XI[r] / 2
            lower = LadderSymbol(mode, r, False)
            upper = LadderSymbol(mode, r, True)
            for word in ((upper, lower), (lower, upper)):
                terms[word] = terms.get(word, sp.S.Zero) + coeff
    return OperatorPoly(terms)


def random_split(rng: random.Random, max_weight: int = 20) -> Tuple[Fraction, Fraction, Fraction]:
    """Random positive rationals n_1 + n_2 + n_3 = 1"""
    weights = [rng.randint(1, max_weight) for _ in range(3)]
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def random_poly(rng: random.Random, modes: Sequence[int] = (0,), max_degree: int = 4,
                max_terms: int = 4, complex_coefficients: bool = True) -> OperatorPoly:
    """Random polynomial with small rational (optionally complex) coefficients"""
    terms: Dict[Word, sp.Expr] = {}
    for _ in range(rng.randint(1, max_terms)):
        degree = rng.randint(0, max_degree)
        word = tuple(
            LadderSymbol(rng.choice(list(modes)), rng.randint(0, 3), rng.random() < 0.5)
            for _ in range(degree)
        )
        coeff = sp.Rational(rng.randint(-6, 6), rng.randint(1, 4))
        if complex_coefficients and rng.random() < 0.3:
            coeff += sp.I * sp.Rational(rng.randint(-3, 3), rng.randint(1, 3))
        terms[word] = terms.get(word, sp.S.Zero) + coeff
    return OperatorPoly(terms)
