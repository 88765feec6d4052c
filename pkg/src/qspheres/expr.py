"""Expression grammar for *-polynomials.

    sum     := ['+'|'-'] product (('+'|'-') product)*
    product := factor (['*'] factor)*          juxtaposition multiplies
    factor  := atom ("'" | '^' int)*           ' is the star; t^k allows k < 0
    atom    := int ['/' int] | letter | 't' | '(' sum ')'

Generators are single letters, so ``C'C`` reads as ``C* C``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from .errors import ParseError
from .ncpoly import Alphabet, NcPoly, Params, Scalar, format_word


@dataclass(frozen=True)
class Rat:
    value: Fraction


@dataclass(frozen=True)
class Phase:
    """The unimodular parameter t."""


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Star:
    arg: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Prod:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Sum:
    terms: Tuple[Tuple[int, "Node"], ...]


Node = Union[Rat, Phase, Gen, Star, Pow, Prod, Sum]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<rat>\d+\s*/\s*\d+)
  | (?P<badrat>\d+\s*/)
  | (?P<int>\d+)
  | (?P<pow>\^\s*-?\s*\d+)
  | (?P<badpow>\^)
  | (?P<ident>[A-Za-z])
  | (?P<op>[()+\-*'])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind == "badrat":
            raise ParseError("malformed rational literal", pos, text)
        if kind == "badpow":
            raise ParseError("'^' must be followed by an integer", pos, text)
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.alphabet = alphabet
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def parse(self) -> Node:
        node = self.sum()
        if self.peek()[0] != "end":
            tok = self.peek()
            if tok[1] == ")":
                raise self.error("unbalanced ')'")
            raise self.error(f"unexpected {tok[1]!r}")
        return node

    def sum(self) -> Node:
        terms = []
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.advance()[1] == "-" else 1
        terms.append((sign, self.product()))
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            sign = -1 if self.advance()[1] == "-" else 1
            terms.append((sign, self.product()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def _starts_factor(self, tok) -> bool:
        kind, value, _ = tok
        return kind in ("rat", "int", "ident") or (kind == "op" and value == "(")

    def product(self) -> Node:
        factors = [self.factor()]
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.advance()
                factors.append(self.factor())
            elif self._starts_factor(tok):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def factor(self) -> Node:
        node = self.atom()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value == "'":
                self.advance()
                node = Star(node)
            elif kind == "pow":
                self.advance()
                exp = int(value[1:].replace(" ", ""))
                if exp < 0 and not isinstance(node, Phase):
                    raise ParseError("negative powers are only allowed on t", pos, self.text)
                node = Pow(node, exp)
            else:
                return node

    def atom(self) -> Node:
        tok = self.advance()
        kind, value, pos = tok
        if kind == "rat":
            num, den = (int(s) for s in value.replace(" ", "").split("/"))
            if den == 0:
                raise ParseError("zero denominator in rational literal", pos, self.text)
            return Rat(Fraction(num, den))
        if kind == "int":
            return Rat(Fraction(int(value)))
        if kind == "ident":
            if value == "t":
                return Phase()
            if value not in self.alphabet.generators:
                raise ParseError(
                    f"unknown identifier {value!r} (alphabet {self.alphabet.name})", pos, self.text
                )
            return Gen(value)
        if kind == "op" and value == "(":
            node = self.sum()
            if self.peek()[1] != ")":
                raise self.error("unbalanced '(': expected ')'")
            self.advance()
            return node
        if kind == "end":
            raise ParseError("unexpected end of expression", pos, self.text)
        raise ParseError(f"unexpected {value!r}", pos, self.text)


def parse_ast(text: str, alphabet: Alphabet) -> Node:
    return _Parser(text, alphabet).parse()


def evaluate_ast(node: Node, alphabet: Alphabet, modulus: int = 1) -> NcPoly:
    ev = lambda n: evaluate_ast(n, alphabet, modulus)
    if isinstance(node, Rat):
        return NcPoly.constant(node.value, alphabet, modulus)
    if isinstance(node, Phase):
        return NcPoly.constant(Scalar.phase(1, modulus), alphabet, modulus)
    if isinstance(node, Gen):
        return NcPoly.word((node.name,), alphabet, modulus)
    if isinstance(node, Star):
        return ev(node.arg).star()
    if isinstance(node, Pow):
        if isinstance(node.base, Phase):
            return NcPoly.constant(Scalar.phase(node.exp, modulus), alphabet, modulus)
        return ev(node.base) ** node.exp
    if isinstance(node, Prod):
        out = NcPoly.one(alphabet, modulus)
        for f in node.factors:
            out = out * ev(f)
        return out
    if isinstance(node, Sum):
        out = NcPoly.zero(alphabet, modulus)
        for sign, term in node.terms:
            out = out + ev(term) if sign > 0 else out - ev(term)
        return out
    raise TypeError(f"not an expression node: {node!r}")


def parse(text: str, alphabet: Alphabet, params: Params = None) -> NcPoly:
    modulus = params.modulus if params is not None else 1
    return evaluate_ast(parse_ast(text, alphabet), alphabet, modulus)


def _needs_parens(node: Node, context: str) -> bool:
    if isinstance(node, Sum):
        return True
    if context == "postfix":
        return isinstance(node, Prod)
    return False


def print_ast(node: Node) -> str:
    if isinstance(node, Rat):
        return str(node.value)
    if isinstance(node, Phase):
        return "t"
    if isinstance(node, Gen):
        return node.name
    if isinstance(node, (Star, Pow)):
        base = node.arg if isinstance(node, Star) else node.base
        text = print_ast(base)
        if _needs_parens(base, "postfix"):
            text = f"({text})"
        return text + ("'" if isinstance(node, Star) else f"^{node.exp}")
    if isinstance(node, Prod):
        parts = []
        for f in node.factors:
            text = print_ast(f)
            parts.append(f"({text})" if isinstance(f, (Sum, Prod)) else text)
        return " ".join(parts)
    if isinstance(node, Sum):
        out = []
        for idx, (sign, term) in enumerate(node.terms):
            text = print_ast(term)
            if isinstance(term, Sum):
                text = f"({text})"
            if idx == 0:
                out.append(("-" if sign < 0 else "") + text)
            else:
                out.append(("- " if sign < 0 else "+ ") + text)
        return " ".join(out)
    raise TypeError(f"not an expression node: {node!r}")


def scalar_to_text(c: Scalar) -> str:
    parts = []
    for e, v in sorted(c.terms.items()):
        if e == 0:
            parts.append(str(v))
        else:
            sym = "t" if e == 1 else f"t^{e}"
            parts.append(sym if v == 1 else f"-{sym}" if v == -1 else f"{v} {sym}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def to_text(x: NcPoly) -> str:
    """Print a polynomial in the grammar accepted by :func:`parse`."""
    if not x:
        return "0"
    chunks = []
    for idx, (w, c) in enumerate(x.sorted_terms()):
        sign = ""
        if len(c.terms) == 1:
            (e, v), = c.terms.items()
            if v < 0:
                sign, c = "-", -c
            coeff = scalar_to_text(c)
        else:
            coeff = f"({scalar_to_text(c)})"
        if not w:
            body = coeff
        elif coeff == "1":
            body = format_word(w)
        else:
            body = f"{coeff} {format_word(w)}"
        if idx == 0:
            chunks.append(sign + body)
        else:
            chunks.append(("- " if sign else "+ ") + body)
    return " ".join(chunks)
