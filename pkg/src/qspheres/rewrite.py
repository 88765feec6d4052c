"""Oriented rewrite systems, normal forms, and the 3-sphere / mirror-sphere maps.

Each :class:`Presentation` carries finite word rules ``lhs -> rhs`` plus
*pattern rules* for infinite families such as ``C E^m C' -> ...``.  Normal
forms are computed by leftmost reduction with a per-presentation memo of
word normal forms.  Every rule strictly decreases the order
(length, number of out-of-place letter pairs), so exceeding the step budget
means a rule was mis-oriented.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import ConfigurationError, PreconditionError, RewriteBudgetExceeded
from .ncpoly import GRADINGS, Alphabet, NcPoly, Params, Scalar, Word, word_degree

DEFAULT_BUDGET = 500_000

Terms = Dict[Word, Scalar]


class PatternRule:
    """A family of rules indexed by an integer size, matched structurally."""

    name = "pattern"

    def match(self, word: Word) -> Optional[Tuple[int, int, Terms]]:
        """Return ``(start, end, rhs)`` for the first match inside ``word``."""
        raise NotImplementedError

    def instances(self, max_len: int) -> List[Tuple[Word, Terms]]:
        raise NotImplementedError


class SandwichRule(PatternRule):
    """``L X^m R -> ratio^m X^m (rhs of L R)`` for m >= 1.

    Valid whenever ``L X = ratio X L``; used for ``C E^m C'`` on the mirror
    sphere and ``D P^m D'`` on the Podles sphere.
    """

    def __init__(self, left: str, middle: str, right: str, ratio: Fraction, inner_rhs: Terms, modulus: int):
        self.left, self.middle, self.right = left, middle, right
        self.ratio = Fraction(ratio)
        self.inner_rhs = inner_rhs
        self.modulus = modulus
        self.name = f"{left} {middle}^m {right}"

    def _rhs(self, m: int) -> Terms:
        scale = Scalar.rational(self.ratio**m, self.modulus)
        prefix = (self.middle,) * m
        return {prefix + w: scale * c for w, c in self.inner_rhs.items()}

    def match(self, word):
        n = len(word)
        for i in range(n - 2):
            if word[i] != self.left or word[i + 1] != self.middle:
                continue
            j = i + 1
            while j < n and word[j] == self.middle:
                j += 1
            if j < n and word[j] == self.right:
                return i, j + 1, self._rhs(j - i - 1)
        return None

    def instances(self, max_len):
        return [
            ((self.left,) + (self.middle,) * m + (self.right,), self._rhs(m))
            for m in range(1, max_len - 1)
        ]


class SphereContraction(PatternRule):
    """``a^i a'^j b^k b'^l -> t^{-(j-1)(k-1)} a^{i-1} b^{k-1} (aa' + bb' - 1) a'^{j-1} b'^{l-1}``.

    The phase comes from moving ``a'^{j-1}`` past ``b^{k-1}``; ``aa'`` commutes
    with ``b`` and ``b'``.  Applied only to words irreducible under the word
    rules, which always have the shape ``a^i a'^j b^k b'^l``.
    """

    name = "a^i a'^j b^k b'^l"

    def __init__(self, modulus: int):
        self.modulus = modulus

    @staticmethod
    def shape(word: Word) -> Optional[Tuple[int, int, int, int]]:
        counts = [0, 0, 0, 0]
        order = ("a", "a'", "b", "b'")
        pos = 0
        for x in word:
            while pos < 4 and order[pos] != x:
                pos += 1
            if pos == 4:
                return None
            counts[pos] += 1
        return tuple(counts)

    def _rhs(self, i, j, k, l) -> Terms:
        phase = Scalar.phase(-(j - 1) * (k - 1), self.modulus)
        head = ("a",) * (i - 1) + ("b",) * (k - 1)
        tail = ("a'",) * (j - 1) + ("b'",) * (l - 1)
        return {
            head + ("a", "a'") + tail: phase,
            head + ("b", "b'") + tail: phase,
            head + tail: -phase,
        }

    def match(self, word):
        s = self.shape(word)
        if s is None or min(s) < 1:
            return None
        return 0, len(word), self._rhs(*s)

    def instances(self, max_len):
        out = []
        for total in range(4, max_len + 1):
            for i in range(1, total - 2):
                for j in range(1, total - i - 1):
                    for k in range(1, total - i - j):
                        l = total - i - j - k
                        w = ("a",) * i + ("a'",) * j + ("b",) * k + ("b'",) * l
                        out.append((w, self._rhs(i, j, k, l)))
        return out


@dataclass
class Overlap:
    """An overlap ambiguity whose two reductions disagree."""

    word: Word
    first_rule: Word
    second_rule: Word
    first_branch: NcPoly
    second_branch: NcPoly

    def __str__(self):
        return (
            f"overlap {' '.join(self.word)} via {' '.join(self.first_rule)} / "
            f"{' '.join(self.second_rule)}: {self.first_branch} != {self.second_branch}"
        )


class Presentation:
    """A *-algebra presented by oriented rewrite rules over an alphabet."""

    def __init__(
        self,
        name: str,
        alphabet: Alphabet,
        params: Params,
        rules: Mapping[Word, Union[NcPoly, Terms]],
        patterns: Sequence[PatternRule] = (),
        grading: Union[str, Mapping[str, int], None] = None,
        budget: int = DEFAULT_BUDGET,
    ):
        self.name = name
        self.alphabet = alphabet
        self.params = params
        self.modulus = params.modulus
        self.grading = GRADINGS.get(grading, {}) if isinstance(grading, str) or grading is None else dict(grading)
        self.grading_name = grading if isinstance(grading, str) else None
        self.budget = budget
        self.rules: Dict[Word, Terms] = {}
        for lhs, rhs in rules.items():
            lhs = tuple(lhs)
            alphabet.check_word(lhs)
            if len(lhs) < 2:
                raise ConfigurationError(f"rule lhs {lhs} must have length >= 2")
            self.rules[lhs] = dict(rhs.terms) if isinstance(rhs, NcPoly) else dict(rhs)
        self._lengths = sorted({len(lhs) for lhs in self.rules})
        self.patterns = list(patterns)
        self._cache: Dict[Word, Terms] = {}

    def __repr__(self):
        return f"Presentation({self.name!r}, p={self.params.p}, q={self.params.q}, theta={self.params.theta})"

    # element construction
    def one(self) -> NcPoly:
        return NcPoly.one(self.alphabet, self.modulus)

    def zero(self) -> NcPoly:
        return NcPoly.zero(self.alphabet, self.modulus)

    def gen(self, name: str) -> NcPoly:
        return NcPoly.word((name,), self.alphabet, self.modulus)

    def word(self, letters: Iterable[str], coeff=1) -> NcPoly:
        return NcPoly.word(letters, self.alphabet, self.modulus, coeff)

    def scalar(self, value) -> NcPoly:
        return NcPoly.constant(value, self.alphabet, self.modulus)

    def t(self, exponent: int = 1) -> NcPoly:
        return NcPoly.constant(self.params.t(exponent), self.alphabet, self.modulus)

    def parse(self, text: str) -> NcPoly:
        from .expr import parse

        return parse(text, self.alphabet, self.params)

    # reduction
    def _reduce_once(self, word: Word) -> Optional[Terms]:
        n = len(word)
        rules = self.rules
        for i in range(n - 1):
            for length in self._lengths:
                if i + length > n:
                    break
                rhs = rules.get(word[i : i + length])
                if rhs is not None:
                    return _splice(word[:i], rhs, word[i + length :])
        for pattern in self.patterns:
            hit = pattern.match(word)
            if hit is not None:
                start, end, rhs = hit
                return _splice(word[:start], rhs, word[end:])
        return None

    def is_canonical(self, word: Word) -> bool:
        return self._reduce_once(tuple(word)) is None

    def _nf_word(self, word: Word) -> Terms:
        cache = self._cache
        hit = cache.get(word)
        if hit is not None:
            return hit
        one = Scalar.rational(1, self.modulus)
        pending: Dict[Word, Optional[Terms]] = {}
        stack = [word]
        steps = 0
        while stack:
            w = stack[-1]
            if w in cache:
                stack.pop()
                continue
            if w not in pending:
                pending[w] = self._reduce_once(w)
                steps += 1
                if steps > self.budget:
                    raise RewriteBudgetExceeded(
                        f"{self.name}: more than {self.budget} rule applications reducing "
                        f"{' '.join(word)}"
                    )
            red = pending[w]
            if red is None:
                cache[w] = {w: one}
                stack.pop()
                continue
            missing = [v for v in red if v not in cache]
            if any(v in pending for v in missing):
                raise RewriteBudgetExceeded(f"{self.name}: rewriting {' '.join(word)} runs into a cycle")
            if missing:
                stack.extend(missing)
                continue
            acc: Terms = {}
            for v, c in red.items():
                for u, d in cache[v].items():
                    s = acc.get(u)
                    acc[u] = c * d if s is None else s + c * d
            cache[w] = {u: c for u, c in acc.items() if c}
            stack.pop()
        return cache[word]

    def normal_form(self, x: NcPoly) -> NcPoly:
        self._check(x)
        acc: Terms = {}
        for w, c in x.terms.items():
            for u, d in self._nf_word(w).items():
                s = acc.get(u)
                acc[u] = c * d if s is None else s + c * d
        return NcPoly._from_clean({u: c for u, c in acc.items() if c}, self.alphabet, self.modulus)

    def equals(self, x: NcPoly, y: NcPoly) -> bool:
        return not self.normal_form(x - y)

    def _check(self, x: NcPoly):
        if x.alphabet != self.alphabet:
            raise ConfigurationError(
                f"polynomial over {x.alphabet.name} given to presentation {self.name}"
            )
        if x.modulus != self.modulus:
            raise ConfigurationError("scalar modulus does not match presentation parameters")

    # rule listings
    def rule_instances(self, max_len: int) -> List[Tuple[Word, Terms]]:
        out = [(lhs, rhs) for lhs, rhs in self.rules.items() if len(lhs) <= max_len]
        for pattern in self.patterns:
            out.extend(pattern.instances(max_len))
        return out

    def relations(self, max_len: int = 4) -> List[Tuple[NcPoly, NcPoly]]:
        """Defining relations as (lhs, rhs) polynomial pairs, pattern families up to ``max_len``."""
        return [
            (
                NcPoly.word(lhs, self.alphabet, self.modulus),
                NcPoly._from_clean(dict(rhs), self.alphabet, self.modulus),
            )
            for lhs, rhs in self.rule_instances(max_len)
        ]

    def degree(self, x: NcPoly) -> Optional[int]:
        return x.degree(self.grading)


def _splice(prefix: Word, rhs: Terms, suffix: Word) -> Terms:
    return {prefix + w + suffix: c for w, c in rhs.items()}


# confluence
def check_local_confluence(P: Presentation, max_overlap_len: int = 4) -> List[Overlap]:
    """Reduce both branches of every overlap ambiguity up to the given word length.

    An empty result certifies local confluence at that length.
    """
    if max_overlap_len < 2:
        raise PreconditionError("max_overlap_len must be >= 2")
    rules = P.rule_instances(max_overlap_len)
    unresolved = []

    def poly(terms):
        return NcPoly._from_clean(dict(terms), P.alphabet, P.modulus)

    def compare(word, l1, l2, b1, b2):
        n1, n2 = P.normal_form(poly(b1)), P.normal_form(poly(b2))
        if n1 != n2:
            unresolved.append(Overlap(word, l1, l2, n1, n2))

    for l1, r1 in rules:
        for l2, r2 in rules:
            # suffix of l1 equals prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] != l2[:k]:
                    continue
                word = l1 + l2[k:]
                if len(word) > max_overlap_len:
                    continue
                compare(word, l1, l2, _splice((), r1, l2[k:]), _splice(l1[:-k], r2, ()))
            # l2 strictly inside l1
            if len(l2) < len(l1):
                for s in range(len(l1) - len(l2) + 1):
                    if l1[s : s + len(l2)] == l2:
                        compare(l1, l1, l2, r1, _splice(l1[:s], r2, l1[s + len(l2) :]))
    return unresolved


# presets
MIRROR_ALPHABET = Alphabet("mirror", ("C", "E", "F"), frozenset({"E", "F"}))
HEEGAARD_ALPHABET = Alphabet("heegaard", ("a", "b"))
PODLES_ALPHABET = Alphabet("podles", ("D", "P", "Q"), frozenset({"P", "Q"}))
TORUS_ALPHABET = Alphabet("torus", ("U", "V"))


def _terms(modulus: int, *pairs) -> Terms:
    out: Terms = {}
    for word, c in pairs:
        c = c if isinstance(c, Scalar) else Scalar.rational(c, modulus)
        out[tuple(word)] = out.get(tuple(word), Scalar(modulus=modulus)) + c
    return {w: c for w, c in out.items() if c}


def mirror_sphere(params: Params = Params()) -> Presentation:
    p, q, n = params.p, params.q, params.modulus
    T = lambda *pairs: _terms(n, *pairs)
    cc_star = T(((), 1), (("E",), -1), (("F",), -q))
    rules = {
        ("C'", "C"): T(((), 1), (("E",), -p), (("F",), -1)),
        ("C", "C'"): cc_star,
        ("E", "C"): T((("C", "E"), p)),
        ("F", "C"): T((("C", "F"), 1 / q)),
        ("C'", "E"): T((("E", "C'"), p)),
        ("C'", "F"): T((("F", "C'"), 1 / q)),
        ("E", "F"): {},
        ("F", "E"): {},
    }
    patterns = [
        SandwichRule("C", "E", "C'", 1 / p, cc_star, n),
        SandwichRule("C", "F", "C'", q, cc_star, n),
    ]
    return Presentation("mirror", MIRROR_ALPHABET, params, rules, patterns, grading="mirror")


def heegaard_sphere(params: Params = Params()) -> Presentation:
    p, q, n = params.p, params.q, params.modulus
    T = lambda *pairs: _terms(n, *pairs)
    t = lambda e: Scalar.phase(e, n)
    rules = {
        ("a'", "a"): T((("a", "a'"), p), ((), 1 - p)),
        ("b'", "b"): T((("b", "b'"), q), ((), 1 - q)),
        ("b", "a"): T((("a", "b"), t(-1))),
        ("b", "a'"): T((("a'", "b"), t(1))),
        ("b'", "a"): T((("a", "b'"), t(1))),
        ("b'", "a'"): T((("a'", "b'"), t(-1))),
    }
    return Presentation(
        "heegaard", HEEGAARD_ALPHABET, params, rules, [SphereContraction(n)], grading="mirror"
    )


def podles_sphere(params: Params = Params()) -> Presentation:
    p, q, n = params.p, params.q, params.modulus
    T = lambda *pairs: _terms(n, *pairs)
    dd_star = T(((), 1), (("P",), -1), (("Q",), -1))
    rules = {
        ("D'", "D"): T(((), 1), (("P",), -p), (("Q",), -q)),
        ("D", "D'"): dd_star,
        ("P", "D"): T((("D", "P"), p)),
        ("Q", "D"): T((("D", "Q"), q)),
        ("D'", "P"): T((("P", "D'"), p)),
        ("D'", "Q"): T((("Q", "D'"), q)),
        ("P", "Q"): {},
        ("Q", "P"): {},
    }
    patterns = [
        SandwichRule("D", "P", "D'", 1 / p, dd_star, n),
        SandwichRule("D", "Q", "D'", 1 / q, dd_star, n),
    ]
    return Presentation("podles", PODLES_ALPHABET, params, rules, patterns, grading="podles")


def quantum_torus(params: Params = Params()) -> Presentation:
    n = params.modulus
    T = lambda *pairs: _terms(n, *pairs)
    t = lambda e: Scalar.phase(e, n)
    rules = {
        ("U", "V"): T((("V", "U"), t(1))),
        ("U", "V'"): T((("V'", "U"), t(-1))),
        ("U'", "V"): T((("V", "U'"), t(-1))),
        ("U'", "V'"): T((("V'", "U'"), t(1))),
        ("U'", "U"): T(((), 1)),
        ("U", "U'"): T(((), 1)),
        ("V'", "V"): T(((), 1)),
        ("V", "V'"): T(((), 1)),
    }
    return Presentation("torus", TORUS_ALPHABET, params, rules, grading="torus")


PRESETS: Dict[str, Callable[[Params], Presentation]] = {
    "mirror": mirror_sphere,
    "heegaard": heegaard_sphere,
    "podles": podles_sphere,
    "torus": quantum_torus,
}


def preset(name: str, params: Params = Params()) -> Presentation:
    try:
        return PRESETS[name](params)
    except KeyError:
        raise ConfigurationError(f"unknown presentation {name!r}; choose from {sorted(PRESETS)}") from None


def presentation_from_config(config: Mapping, params: Optional[Params] = None) -> Presentation:
    """Build a presentation from a declarative mapping.

    Keys: ``name``, ``generators`` (space separated), ``self_adjoint``
    (space separated, optional), ``grading`` (``{symbol: degree}``, optional)
    and ``rules``: a list of ``"lhs -> rhs"`` strings in the expression grammar.
    Each lhs must be a single word.
    """
    from .expr import parse

    params = params or Params()
    try:
        generators = tuple(config["generators"].split())
        rule_texts = list(config["rules"])
    except KeyError as exc:
        raise ConfigurationError(f"presentation config missing key {exc}") from None
    self_adjoint = frozenset(config.get("self_adjoint", "").split())
    alphabet = Alphabet(config.get("name", "custom"), generators, self_adjoint)
    rules = {}
    for text in rule_texts:
        if "->" not in text:
            raise ConfigurationError(f"rule {text!r} lacks '->'")
        lhs_text, rhs_text = text.split("->", 1)
        lhs = parse(lhs_text, alphabet, params)
        if len(lhs) != 1:
            raise ConfigurationError(f"rule lhs {lhs_text!r} must be a single word")
        (word, coeff), = lhs.terms.items()
        if coeff != 1:
            raise ConfigurationError(f"rule lhs {lhs_text!r} must have coefficient 1")
        rules[word] = parse(rhs_text, alphabet, params)
    return Presentation(
        config.get("name", "custom"), alphabet, params, rules, grading=config.get("grading")
    )


# spectral decomposition
def spectral_component(x: NcPoly, d: int, grading: Union[str, Mapping[str, int]] = "mirror") -> NcPoly:
    """Sum of the terms of ``x`` whose words have degree ``d``."""
    return NcPoly._from_clean(
        {w: c for w, c in x.terms.items() if word_degree(w, grading) == d}, x.alphabet, x.modulus
    )


def spectral_decomposition(x: NcPoly, grading="mirror") -> Dict[int, NcPoly]:
    degrees = sorted({word_degree(w, grading) for w in x.terms})
    return {d: spectral_component(x, d, grading) for d in degrees}


# lift and descent between the mirror sphere and the Heegaard 3-sphere
_LIFT_TEXT = {"C": "b' a", "C'": "a' b", "E": "1 - a a'", "F": "1 - b b'"}


def lift(x: NcPoly, heegaard: Presentation) -> NcPoly:
    """Unital *-homomorphism C -> b'a, E -> 1 - aa', F -> 1 - bb', reduced in the 3-sphere."""
    if x.alphabet != MIRROR_ALPHABET:
        raise ConfigurationError("lift expects a mirror-sphere polynomial")
    images = {
        "C": heegaard.word(("b'", "a")),
        "C'": heegaard.word(("a'", "b")),
        "E": heegaard.one() - heegaard.word(("a", "a'")),
        "F": heegaard.one() - heegaard.word(("b", "b'")),
    }
    out = heegaard.zero()
    for w, c in x.terms.items():
        term = NcPoly.constant(c, heegaard.alphabet, heegaard.modulus)
        for letter in w:
            term = term * images[letter]
        out = out + term
    return heegaard.normal_form(out)


def _descend_monomial(i: int, j: int, k: int, l: int, mirror: Presentation) -> NcPoly:
    """Mirror-sphere preimage of ``a^i a'^j b^k b'^l`` with ``i - j + k - l == 0``.

    Uses ``a^r a'^r = prod_{s<r}(1 - p^{-s} E)``, ``b^r b'^r = prod_{s<r}(1 - q^{-s} F)``,
    ``a f(E) = f(E / p) a``, ``a^d b'^d = t^{-d(d+1)/2} C^d`` and
    ``a'^e b^e = t^{-e(e-1)/2} C'^e``.
    """
    p, q = mirror.params.p, mirror.params.q
    one, E, F = mirror.one(), mirror.gen("E"), mirror.gen("F")

    def a_block(r, shift):
        out = one
        for s in range(r):
            out = out * (one - E * (p ** (-(s + shift))))
        return out

    def b_block(r):
        out = one
        for s in range(r):
            out = out * (one - F * (q ** (-s)))
        return out

    d = i - j
    if d >= 0:
        # a^d (a^j a'^j)(b^k b'^k) b'^d
        shift = mirror.t(-d * (d + 1) // 2) * mirror.word(("C",) * d)
        result = a_block(j, d) * b_block(k) * shift
    else:
        e = -d
        # (a^i a'^i)(a'^e b^e)(b^l b'^l)
        shift = mirror.t(-e * (e - 1) // 2) * mirror.word(("C'",) * e)
        result = a_block(i, 0) * shift * b_block(l)
    return mirror.normal_form(result)


def descend(x: NcPoly, heegaard: Presentation, mirror: Presentation) -> NcPoly:
    """Inverse of :func:`lift` on the degree-0 part of the 3-sphere."""
    x = heegaard.normal_form(x)
    out = mirror.zero()
    for w, c in x.terms.items():
        if word_degree(w, "mirror") != 0:
            raise PreconditionError(f"descend needs mirror degree 0, got word {' '.join(w)}")
        shape = SphereContraction.shape(w)
        if shape is None:
            raise PreconditionError(f"word {' '.join(w)} is not a 3-sphere canonical monomial")
        out = out + NcPoly.constant(c, mirror.alphabet, mirror.modulus) * _descend_monomial(*shape, mirror)
    return out
