"""Exact scalars and noncommutative *-polynomials.

Scalars live in Q[t]/(t^N - 1): rational combinations of powers of a root of
unity ``t = exp(2 pi i theta)`` with ``theta = M/N``.  Polynomials are finite
linear combinations of words over an :class:`Alphabet`; a word is a plain tuple
of letter names such as ``("b'", "a")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .errors import ConfigurationError

Word = Tuple[str, ...]
Rationalish = Union[int, Fraction, str]


def as_fraction(value: Rationalish) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigurationError(f"malformed rational {value!r}") from exc
    raise ConfigurationError(f"not an exact rational: {value!r}")


class Scalar:
    """Element of Q[t]/(t^N - 1), stored as ``{exponent mod N: Fraction}``.

    Zero coefficients are never stored.  Instances are immutable and hashable.
    """

    __slots__ = ("_terms", "modulus", "_hash")

    def __init__(self, terms: Optional[Mapping[int, Rationalish]] = None, modulus: int = 1):
        if modulus < 1:
            raise ConfigurationError("scalar modulus must be a positive integer")
        acc: Dict[int, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = as_fraction(c)
                if c:
                    k = e % modulus
                    acc[k] = acc.get(k, 0) + c
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self.modulus = modulus
        self._hash = None

    @classmethod
    def _raw(cls, items, modulus):
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted(items))
        obj.modulus = modulus
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, value: Rationalish, modulus: int = 1) -> "Scalar":
        return cls({0: value}, modulus)

    @classmethod
    def phase(cls, exponent: int, modulus: int = 1, coeff: Rationalish = 1) -> "Scalar":
        return cls({exponent: coeff}, modulus)

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_rational(self) -> bool:
        return all(e == 0 for e, _ in self._terms)

    def rational_part(self) -> Fraction:
        """The coefficient of t^0; raises if other powers of t survive."""
        if not self.is_rational():
            raise ValueError(f"scalar {self} depends on t")
        return self._terms[0][1] if self._terms else Fraction(0)

    def _check(self, other: "Scalar"):
        if self.modulus != other.modulus:
            raise ConfigurationError(
                f"scalar modulus mismatch: {self.modulus} vs {other.modulus}"
            )

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            self._check(other)
            return other
        return Scalar.rational(other, self.modulus)

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return Scalar._raw(((e, c) for e, c in acc.items() if c), self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(((e, -c) for e, c in self._terms), self.modulus)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if len(other._terms) == 1 and other._terms[0][0] == 0:
            c = other._terms[0][1]
            return Scalar._raw(((e, x * c) for e, x in self._terms), self.modulus)
        n = self.modulus
        acc: Dict[int, Fraction] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                k = (e1 + e2) % n
                acc[k] = acc.get(k, 0) + c1 * c2
        return Scalar._raw(((e, c) for e, c in acc.items() if c), n)

    __rmul__ = __mul__

    def conj(self) -> "Scalar":
        n = self.modulus
        return Scalar._raw((((-e) % n, c) for e, c in self._terms), n)

    def inverse(self) -> "Scalar":
        """Inverse of a monomial scalar ``c t^e``; general elements are not invertible here."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"only monomial scalars are invertible, got {self}")
        (e, c), = self._terms
        return Scalar._raw([((-e) % self.modulus, 1 / c)], self.modulus)

    def to_complex(self, theta: Fraction) -> complex:
        import cmath

        return sum(
            (float(c) * cmath.exp(2j * cmath.pi * float(theta) * e) for e, c in self._terms),
            0j,
        )

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.modulus == other.modulus and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ((((0, Fraction(other)),) if other else ()))
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._terms, self.modulus))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms:
            if e == 0:
                parts.append(str(c))
            else:
                sym = "t" if e == 1 else f"t^{e}"
                parts.append(sym if c == 1 else f"{c} {sym}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Scalar({dict(self._terms)!r}, modulus={self.modulus})"


@dataclass(frozen=True)
class Params:
    """Deformation parameters: 0 < p, q < 1 and 0 <= theta < 1, all exact."""

    p: Fraction = Fraction(1, 2)
    q: Fraction = Fraction(1, 3)
    theta: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("p", "q", "theta"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.p < 1:
            raise ConfigurationError(f"p must lie strictly inside (0, 1), got {self.p}")
        if not 0 < self.q < 1:
            raise ConfigurationError(f"q must lie strictly inside (0, 1), got {self.q}")
        if not 0 <= self.theta < 1:
            raise ConfigurationError(f"theta must lie in [0, 1), got {self.theta}")

    @property
    def modulus(self) -> int:
        """Order of t, i.e. the reduced denominator of theta."""
        return self.theta.denominator

    def t(self, exponent: int = 1) -> Scalar:
        return Scalar.phase(exponent, self.modulus)

    def as_dict(self) -> Dict[str, str]:
        return {"p": str(self.p), "q": str(self.q), "theta": str(self.theta)}


@dataclass(frozen=True)
class Letter:
    symbol: str
    starred: bool = False
    degree: int = 0
    self_adjoint: bool = False

    @property
    def name(self) -> str:
        return self.symbol + ("'" if self.starred else "")


@dataclass(frozen=True)
class Alphabet:
    """Generators of a *-algebra; self-adjoint generators have no separate star letter."""

    name: str
    generators: Tuple[str, ...]
    self_adjoint: frozenset = field(default_factory=frozenset)
    letters: Dict[str, Letter] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        letters = {}
        for g in self.generators:
            if g in self.self_adjoint:
                letters[g] = Letter(g, False, 0, True)
            else:
                letters[g] = Letter(g, False)
                letters[g + "'"] = Letter(g, True)
        object.__setattr__(self, "letters", letters)

    def __contains__(self, name):
        return name in self.letters

    def star_letter(self, name: str) -> str:
        if name.endswith("'"):
            return name[:-1]
        return name if name in self.self_adjoint else name + "'"

    def star_word(self, word: Word) -> Word:
        return tuple(self.star_letter(x) for x in reversed(word))

    def check_word(self, word: Word):
        for x in word:
            if x not in self.letters:
                raise ConfigurationError(f"letter {x!r} not in alphabet {self.name}")


# Gradings map a generator symbol to its degree; starred letters get the negative.
GRADINGS: Dict[str, Dict[str, int]] = {
    "mirror": {"a": 1, "b": 1},
    "podles": {"a": 1, "b": -1},
    "torus": {"U": 1},
}


def letter_degree(name: str, grading: Mapping[str, int]) -> int:
    if name.endswith("'"):
        return -grading.get(name[:-1], 0)
    return grading.get(name, 0)


def word_degree(word: Word, grading: Union[str, Mapping[str, int]]) -> int:
    if isinstance(grading, str):
        grading = GRADINGS[grading]
    return sum(letter_degree(x, grading) for x in word)


def format_word(word: Word) -> str:
    """Compact text form: runs collapse to powers, e.g. ``a^2 a' b'``."""
    if not word:
        return "1"
    parts = []
    for name, run in groupby(word):
        n = len(list(run))
        parts.append(name if n == 1 else f"{name}^{n}")
    return " ".join(parts)


class NcPoly:
    """Finite linear combination of words with :class:`Scalar` coefficients.

    Arithmetic is exact and free: no relations are applied here (see
    :mod:`qspheres.rewrite`).
    """

    __slots__ = ("terms", "alphabet", "modulus")

    def __init__(self, terms: Optional[Mapping[Word, Scalar]], alphabet: Alphabet, modulus: int = 1):
        self.alphabet = alphabet
        self.modulus = modulus
        clean = {}
        if terms:
            for w, c in terms.items():
                if not isinstance(c, Scalar):
                    c = Scalar.rational(c, modulus)
                elif c.modulus != modulus:
                    raise ConfigurationError("scalar modulus does not match polynomial")
                if c:
                    clean[tuple(w)] = c
        self.terms: Dict[Word, Scalar] = clean

    # construction helpers
    @classmethod
    def _from_clean(cls, terms, alphabet, modulus):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.alphabet = alphabet
        obj.modulus = modulus
        return obj

    @classmethod
    def zero(cls, alphabet: Alphabet, modulus: int = 1) -> "NcPoly":
        return cls._from_clean({}, alphabet, modulus)

    @classmethod
    def one(cls, alphabet: Alphabet, modulus: int = 1) -> "NcPoly":
        return cls.constant(1, alphabet, modulus)

    @classmethod
    def constant(cls, c, alphabet: Alphabet, modulus: int = 1) -> "NcPoly":
        return cls({(): c}, alphabet, modulus)

    @classmethod
    def word(cls, word: Iterable[str], alphabet: Alphabet, modulus: int = 1, coeff=1) -> "NcPoly":
        word = tuple(word)
        alphabet.check_word(word)
        return cls({word: coeff}, alphabet, modulus)

    # structural helpers
    def _compatible(self, other: "NcPoly"):
        if self.alphabet != other.alphabet:
            raise ConfigurationError(
                f"alphabet mismatch: {self.alphabet.name} vs {other.alphabet.name}"
            )
        if self.modulus != other.modulus:
            raise ConfigurationError(f"scalar modulus mismatch: {self.modulus} vs {other.modulus}")

    def _lift_operand(self, other) -> "NcPoly":
        if isinstance(other, NcPoly):
            self._compatible(other)
            return other
        if isinstance(other, Scalar):
            return NcPoly({(): other}, self.alphabet, self.modulus)
        return NcPoly.constant(as_fraction(other), self.alphabet, self.modulus)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coefficient(self, word: Iterable[str]) -> Scalar:
        return self.terms.get(tuple(word), Scalar(modulus=self.modulus))

    def __add__(self, other):
        other = self._lift_operand(other)
        acc = dict(self.terms)
        for w, c in other.terms.items():
            s = acc.get(w)
            s = c if s is None else s + c
            if s:
                acc[w] = s
            else:
                acc.pop(w, None)
        return NcPoly._from_clean(acc, self.alphabet, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly._from_clean({w: -c for w, c in self.terms.items()}, self.alphabet, self.modulus)

    def __sub__(self, other):
        return self + (-self._lift_operand(other))

    def __rsub__(self, other):
        return self._lift_operand(other) - self

    def __mul__(self, other):
        other = self._lift_operand(other)
        acc: Dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                s = acc.get(w)
                acc[w] = c if s is None else s + c
        return NcPoly._from_clean({w: c for w, c in acc.items() if c}, self.alphabet, self.modulus)

    def __rmul__(self, other):
        return self._lift_operand(other) * self

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined for polynomials")
        out = NcPoly.one(self.alphabet, self.modulus)
        for _ in range(n):
            out = out * self
        return out

    def star(self) -> "NcPoly":
        sw = self.alphabet.star_word
        return NcPoly._from_clean(
            {sw(w): c.conj() for w, c in self.terms.items()}, self.alphabet, self.modulus
        )

    def degree(self, grading: Union[str, Mapping[str, int]] = "mirror") -> Optional[int]:
        """Common degree of all words, or ``None`` when the polynomial is inhomogeneous."""
        degrees = {word_degree(w, grading) for w in self.terms}
        if not degrees:
            return 0
        return degrees.pop() if len(degrees) == 1 else None

    def max_word_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_rational_constant(self) -> bool:
        return all(w == () for w in self.terms) and all(c.is_rational() for c in self.terms.values())

    def __eq__(self, other):
        if isinstance(other, NcPoly):
            return (
                self.alphabet == other.alphabet
                and self.modulus == other.modulus
                and self.terms == other.terms
            )
        if isinstance(other, (int, Fraction)):
            return self == NcPoly.constant(other, self.alphabet, self.modulus)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (len(item[0]), item[0]))

    def __str__(self):
        from .expr import to_text

        return to_text(self)

    def __repr__(self):
        return f"NcPoly<{self.alphabet.name}>({self})"
