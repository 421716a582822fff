"""Exact symbolic algebra of characteristic classes.

Graded polynomials in formal variables ``c_i`` (Chern), ``s_i`` (Segre) and
``ch_i`` (Chern character), one variable family per bundle slot, with exact
rational coefficients.  The variable ``c_i``/``s_i``/``ch_i`` carries grade
``i``; a product of Chern/Segre variables of total grade ``k`` represents a
``(k,k)``-form component.

Floating point is forbidden here: every identity test downstream relies on
bit-exact arithmetic, so coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterator, Mapping

__all__ = [
    "DEFAULT_MAX_DEGREE",
    "DegreeOverflowError",
    "Partition",
    "partitions",
    "BundleSlot",
    "Symbol",
    "CharClassPoly",
    "segre_to_chern",
    "chern_to_segre",
    "chern_character",
    "whitney_sum",
    "dual_class",
    "ch_tensor",
]

DEFAULT_MAX_DEGREE = 10

#: default bundle slot used by the single-bundle operations
DEFAULT_SLOT = ""

FAMILIES = ("c", "s", "ch")


class DegreeOverflowError(ValueError):
    """Requested degree exceeds the configured maximum."""


@dataclass(frozen=True)
class Partition:
    """A partition of a non-negative integer, parts non-increasing."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(p <= 0 for p in self.parts):
            raise ValueError(f"partition parts must be positive: {self.parts}")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"partition parts must be non-increasing: {self.parts}")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)


def partitions(k: int) -> list[Partition]:
    """All partitions of ``k`` exactly once, in reverse-lexicographic order.

    ``k = 0`` yields the singleton list containing the empty partition.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")

    out: list[Partition] = []

    def descend(remaining: int, largest: int, prefix: tuple[int, ...]) -> None:
        if remaining == 0:
            out.append(Partition(prefix))
            return
        for part in range(min(remaining, largest), 0, -1):
            descend(remaining - part, part, prefix + (part,))

    descend(k, k if k else 1, ())
    return out


@dataclass(frozen=True)
class BundleSlot:
    """Label + rank for one of the bundles entering a product formula."""

    identifier: str
    rank: int

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


# A formal variable: (slot identifier, family, index), e.g. ("", "c", 2).
Symbol = tuple[str, str, int]

# A monomial is a sorted tuple of symbols, with repetition for powers.
Monomial = tuple[Symbol, ...]

_ONE: Monomial = ()


def _symbol_grade(sym: Symbol) -> int:
    return sym[2]


def _monomial_grade(mono: Monomial) -> int:
    return sum(_symbol_grade(s) for s in mono)


def _mul_monomials(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(a + b))


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational) or isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"coefficients must be exact rationals, got {type(value).__name__}")


class CharClassPoly:
    """Polynomial in characteristic-class variables with Fraction coefficients.

    Immutable; arithmetic returns new polynomials.  Zero coefficients are
    never stored, so equality of term maps is equality of polynomials.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = _coerce(coeff)
                if coeff != 0:
                    clean[tuple(sorted(mono))] = coeff
        self._terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "CharClassPoly":
        return CharClassPoly()

    @staticmethod
    def constant(value) -> "CharClassPoly":
        return CharClassPoly({_ONE: _coerce(value)})

    @staticmethod
    def variable(family: str, index: int, slot: str = DEFAULT_SLOT) -> "CharClassPoly":
        if family not in FAMILIES:
            raise ValueError(f"unknown variable family {family!r}")
        if index < 1:
            raise ValueError(f"variable index must be >= 1, got {index}")
        return CharClassPoly({((slot, family, index),): Fraction(1)})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(sorted(mono)), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def grades(self) -> set[int]:
        return {_monomial_grade(m) for m in self._terms}

    def is_homogeneous(self, grade: int | None = None) -> bool:
        gs = self.grades()
        if not gs:
            return True
        if len(gs) > 1:
            return False
        return grade is None or gs == {grade}

    def graded_part(self, grade: int) -> "CharClassPoly":
        return CharClassPoly(
            {m: c for m, c in self._terms.items() if _monomial_grade(m) == grade}
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "CharClassPoly") -> "CharClassPoly":
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return CharClassPoly(terms)

    def __neg__(self) -> "CharClassPoly":
        return CharClassPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "CharClassPoly") -> "CharClassPoly":
        return self + (-other)

    def __mul__(self, other) -> "CharClassPoly":
        if not isinstance(other, CharClassPoly):
            scalar = _coerce(other)
            return CharClassPoly({m: c * scalar for m, c in self._terms.items()})
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _mul_monomials(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return CharClassPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CharClassPoly":
        if n < 0:
            raise ValueError("negative powers not defined")
        result = CharClassPoly.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, CharClassPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def truncate(self, max_grade: int) -> "CharClassPoly":
        return CharClassPoly(
            {m: c for m, c in self._terms.items() if _monomial_grade(m) <= max_grade}
        )

    def substitute(self, mapping: Mapping[Symbol, "CharClassPoly"]) -> "CharClassPoly":
        """Replace each symbol found in ``mapping`` by the given polynomial."""
        result = CharClassPoly.zero()
        for mono, coeff in self._terms.items():
            term = CharClassPoly.constant(coeff)
            for sym in mono:
                factor = mapping.get(sym)
                if factor is None:
                    factor = CharClassPoly({(sym,): Fraction(1)})
                term = term * factor
            result = result + term
        return result

    def evaluate(self, assignment: Mapping[Symbol, Fraction]) -> Fraction:
        """Evaluate with every symbol bound to an exact rational."""
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            value = coeff
            for sym in mono:
                value *= assignment[sym]
            total += value
        return total

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        """Canonical ASCII form, e.g. ``c1^2 - c2`` or ``1/2*c1^2 - c2``."""
        if not self._terms:
            return "0"
        keyed = sorted(self._terms.items(), key=lambda kv: _render_sort_key(kv[0]))
        pieces: list[str] = []
        for mono, coeff in keyed:
            body = _render_monomial(mono)
            mag = abs(coeff)
            if body:
                head = body if mag == 1 else f"{mag}*{body}"
            else:
                head = str(mag)
            if not pieces:
                pieces.append(head if coeff > 0 else f"-{head}")
            else:
                pieces.append(f"+ {head}" if coeff > 0 else f"- {head}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"CharClassPoly({self.render()})"


def _render_sort_key(mono: Monomial):
    # graded order, then reverse-lexicographic on the symbol tuple
    return (_monomial_grade(mono), mono)


def _render_monomial(mono: Monomial) -> str:
    if not mono:
        return ""
    parts: list[str] = []
    i = 0
    while i < len(mono):
        sym = mono[i]
        power = 1
        while i + power < len(mono) and mono[i + power] == sym:
            power += 1
        slot, family, index = sym
        name = f"{family}{index}" if slot == DEFAULT_SLOT else f"{family}{index}({slot})"
        parts.append(name if power == 1 else f"{name}^{power}")
        i += power
    return "*".join(parts)


def _check_degree(k: int, max_degree: int) -> None:
    if k > max_degree:
        raise DegreeOverflowError(
            f"degree {k} exceeds configured maximum {max_degree}"
        )


def _var(family: str, index: int, slot: str = DEFAULT_SLOT) -> CharClassPoly:
    return CharClassPoly.variable(family, index, slot)


@lru_cache(maxsize=None)
def segre_to_chern(k: int, max_degree: int = DEFAULT_MAX_DEGREE) -> CharClassPoly:
    """``s_k`` expressed in ``c_1..c_k`` by the total-class inverse recursion.

    Solves ``s_k + s_{k-1} c_1 + ... + s_1 c_{k-1} + c_k = 0``; all
    coefficients are integers.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_degree(k, max_degree)
    acc = _var("c", k)
    for j in range(1, k):
        acc = acc + segre_to_chern(k - j, max_degree) * _var("c", j)
    return -acc


@lru_cache(maxsize=None)
def chern_to_segre(k: int, max_degree: int = DEFAULT_MAX_DEGREE) -> CharClassPoly:
    """``c_k`` expressed in ``s_1..s_k``; mirror image of :func:`segre_to_chern`."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_degree(k, max_degree)
    acc = _var("s", k)
    for j in range(1, k):
        acc = acc + chern_to_segre(k - j, max_degree) * _var("s", j)
    return -acc


@lru_cache(maxsize=None)
def _power_sum(k: int) -> CharClassPoly:
    # Newton's identities on Chern roots: e_i := c_i formally, all ranks.
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    acc = CharClassPoly.zero()
    for i in range(1, k):
        sign = 1 if i % 2 == 1 else -1
        acc = acc + sign * (_var("c", i) * _power_sum(k - i))
    tail_sign = 1 if k % 2 == 1 else -1
    return acc + tail_sign * k * _var("c", k)


def chern_character(k: int, rank: int) -> CharClassPoly:
    """``ch_k`` in Chern variables, exact rationals; ``ch_0`` equals the rank.

    For ``k >= 1`` the polynomial is rank-independent (power sums of Chern
    roots over ``k!``); the coefficients need not be integers, e.g.
    ``ch_2 = 1/2*c1^2 - c2``.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        return CharClassPoly.constant(rank)
    factorial = 1
    for i in range(2, k + 1):
        factorial *= i
    return _power_sum(k) * Fraction(1, factorial)


def whitney_sum(k: int, slot1: BundleSlot, slot2: BundleSlot) -> CharClassPoly:
    """Degree-``k`` part of the product of total Chern classes of two slots."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    acc = CharClassPoly.zero()
    for j in range(k + 1):
        left = (
            CharClassPoly.constant(1)
            if j == 0
            else _var("c", j, slot1.identifier)
        )
        right = (
            CharClassPoly.constant(1)
            if k - j == 0
            else _var("c", k - j, slot2.identifier)
        )
        acc = acc + left * right
    return acc


def dual_class(k: int) -> CharClassPoly:
    """``(-1)^k c_k``: the Chern class of the dual bundle."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        return CharClassPoly.constant(1)
    sign = 1 if k % 2 == 0 else -1
    return sign * _var("c", k)


def _slotted(poly: CharClassPoly, slot: str) -> CharClassPoly:
    """Move default-slot variables of ``poly`` into ``slot``."""
    mapping = {
        sym: CharClassPoly({((slot, sym[1], sym[2]),): Fraction(1)})
        for mono in poly.terms
        for sym in mono
        if sym[0] == DEFAULT_SLOT
    }
    return poly.substitute(mapping)


def ch_tensor(k: int, slot1: BundleSlot, slot2: BundleSlot) -> CharClassPoly:
    """Degree-``k`` Chern character of a tensor product of two slots.

    ``sum_j ch_j(slot1) * ch_{k-j}(slot2)`` with each ``ch`` expanded into
    Chern variables of its own slot.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    acc = CharClassPoly.zero()
    for j in range(k + 1):
        left = _slotted(chern_character(j, slot1.rank), slot1.identifier)
        right = _slotted(chern_character(k - j, slot2.rank), slot2.identifier)
        acc = acc + left * right
    return acc


def chern_in_segre_coefficients(k: int) -> dict[Partition, Fraction]:
    """Coefficients ``a_K`` of ``c_k = sum_K a_K s_{k_1} * ... * s_{k_m}``.

    Keyed by partition of ``k``; used by the current-assembly pipelines.
    """
    poly = chern_to_segre(k)
    out: dict[Partition, Fraction] = {}
    for mono, coeff in poly.terms.items():
        indices = tuple(sorted((sym[2] for sym in mono), reverse=True))
        out[Partition(indices)] = coeff
    return out


def chern_character_coefficients(k: int) -> dict[Partition, Fraction]:
    """Coefficients ``b_K`` of ``ch_k = sum_K b_K c_{k_1} * ... * c_{k_m}``.

    Exact rationals; not forced to be integers (``ch_2`` has 1/2).
    """
    poly = chern_character(k, rank=1) if k else CharClassPoly.zero()
    out: dict[Partition, Fraction] = {}
    for mono, coeff in poly.terms.items():
        indices = tuple(sorted((sym[2] for sym in mono), reverse=True))
        out[Partition(indices)] = coeff
    return out
