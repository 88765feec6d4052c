"""Fredholm-module traces and the Chern-Connes pairing with idempotents.

Two independent routes compute each trace:

* exact: closed-form geometric series on canonical monomials, in Q[t];
* numeric: diagonal sum of the difference of two truncated representations
  (interlaced minus bilateral symbol for the mirror sphere, rho_1 minus rho_2
  for the Podles sphere).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bundles import IdempotentMatrix
from .errors import ConfigurationError, PreconditionError, ThetaDependenceError
from .ncpoly import NcPoly, Params, Scalar
from .rep import (
    build_interlaced,
    build_podles_pair,
    build_symbol_bilateral,
    evaluate,
    spectral_projection,
)
from .rewrite import MIRROR_ALPHABET, PODLES_ALPHABET, Presentation, mirror_sphere, podles_sphere

DEFAULT_LADDER = tuple(range(8, 81, 4))


def _monomial_trace(word, shift_letters, diag_values) -> Fraction:
    if not word:
        return Fraction(0)
    if any(x in shift_letters for x in word):
        return Fraction(0)
    letter = word[0]
    if any(x != letter for x in word):
        raise PreconditionError(f"word {' '.join(word)} is not canonical")
    return diag_values[letter](len(word))


def _exact_trace(x: NcPoly, P: Presentation, shift_letters, diag_values) -> Scalar:
    if x.alphabet != P.alphabet:
        raise ConfigurationError(f"trace on {P.name} got a polynomial over {x.alphabet.name}")
    total = Scalar(modulus=x.modulus)
    for w, c in x.terms.items():
        if not P.is_canonical(w):
            raise PreconditionError(f"word {' '.join(w)} is not in {P.name} normal form")
        v = _monomial_trace(w, shift_letters, diag_values)
        if v:
            total = total + c * v
    return total


def tr_mirror_exact(x: NcPoly, mirror: Optional[Presentation] = None, params: Params = Params()) -> Scalar:
    """tr(E^m) = 1/(1 - p^m), tr(F^m) = 1/(1 - q^m), zero on 1 and on words containing C or C'."""
    M = mirror or mirror_sphere(params)
    p, q = M.params.p, M.params.q
    return _exact_trace(
        x,
        M,
        ("C", "C'"),
        {"E": lambda m: 1 / (1 - p**m), "F": lambda m: 1 / (1 - q**m)},
    )


def tr_podles_exact(x: NcPoly, podles: Optional[Presentation] = None, params: Params = Params()) -> Scalar:
    """tr(P^m) = 1/(1 - p^m), tr(Q^m) = -1/(1 - q^m): the rho_2 half enters with a minus sign."""
    Pp = podles or podles_sphere(params)
    p, q = Pp.params.p, Pp.params.q
    return _exact_trace(
        x,
        Pp,
        ("D", "D'"),
        {"P": lambda m: 1 / (1 - p**m), "Q": lambda m: -1 / (1 - q**m)},
    )


def _numeric_pair(kind: str, params: Params, N: int):
    if kind == "mirror":
        return build_interlaced(params, N), build_symbol_bilateral(N, params)
    if kind == "podles":
        return build_podles_pair(params, N)
    raise ConfigurationError(f"unknown trace kind {kind!r}")


def difference_operator(x: NcPoly, params: Params, N: int, kind: str = "mirror"):
    """``rho(x) - rho'(x)`` on a window padded so that labels |j| <= N are exact."""
    pad = x.max_word_length() + 2
    first, second = _numeric_pair(kind, params, N + pad)
    return evaluate(x, first) - evaluate(x, second)


@dataclass
class NumericTrace:
    value: complex
    series: List[Tuple[int, float]]
    imag_residual: float = 0.0

    def __float__(self):
        return float(np.real(self.value))


def tr_numeric(
    x: NcPoly,
    N: int = 64,
    params: Params = Params(),
    kind: str = "mirror",
    ladder: Optional[Sequence[int]] = None,
) -> NumericTrace:
    """Truncated trace of the difference operator over labels |j| <= N (or 0..N).

    ``series`` holds the partial traces for each ladder value n <= N, all read
    from one padded evaluation.
    """
    expected = MIRROR_ALPHABET if kind == "mirror" else PODLES_ALPHABET
    if x.alphabet != expected:
        raise ConfigurationError(f"{kind} trace got a polynomial over {x.alphabet.name}")
    ladder = sorted(set(ladder or [n for n in DEFAULT_LADDER if n <= N]) | {N})
    if ladder[-1] > N:
        raise PreconditionError("ladder values must not exceed N")
    diff = difference_operator(x, params, N, kind)
    labels = diff.window.labels
    diag = diff.diagonal()
    series = []
    value = 0j
    for n in ladder:
        mask = np.abs(labels) <= n
        s = complex(diag[mask].sum())
        series.append((n, s.real))
        if n == N:
            value = s
    imag = abs(value.imag)
    return NumericTrace(value.real if imag < 1e-12 else value, series, imag)


@dataclass
class TraceFunctional:
    kind: str = "mirror"
    params: Params = field(default_factory=Params)

    def __post_init__(self):
        if self.kind not in ("mirror", "podles"):
            raise ConfigurationError(f"unknown trace kind {self.kind!r}")
        self.presentation = mirror_sphere(self.params) if self.kind == "mirror" else podles_sphere(self.params)

    def exact(self, x: NcPoly) -> Scalar:
        x = self.presentation.normal_form(x)
        if self.kind == "mirror":
            return tr_mirror_exact(x, self.presentation)
        return tr_podles_exact(x, self.presentation)

    def numeric(self, x: NcPoly, N: int = 64, ladder=None) -> NumericTrace:
        return tr_numeric(x, N, self.params, self.kind, ladder)


@dataclass
class SummabilityReport:
    ns: List[int]
    diagonal_tails: List[float]
    trace_norm_tails: List[float]
    ratio: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.ratio <= self.bound


def _fit_ratio(ns, tails, floor=1e-13) -> float:
    pts = [(n, t) for n, t in zip(ns, tails) if t > floor]
    if len(pts) < 3:
        return 0.0
    # skip the first point: the j = -1 defect is a one-off jump, not part of the decay
    pts = pts[1:]
    slope = np.polyfit([n for n, _ in pts], np.log([t for _, t in pts]), 1)[0]
    return float(np.exp(slope))


def summability_report(x: NcPoly, N: int = 64, params: Params = Params(), kind: str = "mirror") -> SummabilityReport:
    """Tail sums of the difference operator outside |j| <= n, with a fitted geometric ratio.

    The trace-norm tail is the nuclear norm of the block on labels |j| > n
    (rows and columns), which bounds the trace-class tail of the operator.
    """
    diff = difference_operator(x, params, N, kind)
    labels = diff.window.labels
    dense = diff.matrix.toarray()
    inside = np.abs(labels) <= N
    ns = list(range(0, N))
    diag_tails, norm_tails = [], []
    for n in ns:
        sel = np.nonzero(inside & (np.abs(labels) > n))[0]
        block = dense[np.ix_(sel, sel)]
        diag_tails.append(float(np.abs(np.diagonal(block)).sum()))
        norm_tails.append(float(np.linalg.svd(block, compute_uv=False).sum()) if block.size else 0.0)
    bound = float(max(params.p, params.q)) + 0.05
    return SummabilityReport(ns, diag_tails, norm_tails, _fit_ratio(ns, norm_tails), bound)


@dataclass
class PairingReport:
    mu: int
    params: Params
    exact: Fraction
    series: List[Tuple[int, float]]
    numeric: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def errors(self) -> List[Tuple[int, float]]:
        return [(n, abs(v - float(self.exact))) for n, v in self.series]

    def geometric_beyond(self, burn_in: int = 20, floor: float = 1e-13) -> bool:
        """Errors strictly decrease along the ladder past ``burn_in`` until they hit ``floor``."""
        errs = [e for n, e in self.errors() if n >= burn_in]
        for a, b in zip(errs, errs[1:]):
            if a <= floor:
                break
            if not b < a:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "p": str(self.params.p),
            "q": str(self.params.q),
            "theta": str(self.params.theta),
            "exact": f"{self.exact.numerator}/{self.exact.denominator}",
            "series": [[n, v] for n, v in self.series],
            "numeric": self.numeric,
            "lens": dict(self.meta) or None,
        }

    def to_csv_rows(self) -> List[List]:
        return [[self.mu, n, v, abs(v - float(self.exact))] for n, v in self.series]


def pairing(
    E: IdempotentMatrix,
    tr: Optional[TraceFunctional] = None,
    mode: str = "both",
    N: int = 80,
    ladder: Optional[Sequence[int]] = None,
) -> PairingReport:
    """<tr, [E]> = tr(sum_i E_ii), exactly and/or through truncated operator traces."""
    tr = tr or TraceFunctional("mirror", E.params)
    if tr.kind != "mirror":
        raise ConfigurationError("line-bundle idempotents live over the mirror sphere")
    if mode not in ("exact", "numeric", "both"):
        raise ConfigurationError(f"mode must be exact, numeric or both, got {mode!r}")
    trace_poly = E.trace_polynomial(tr.presentation)
    value = tr.exact(trace_poly)
    if not value.is_rational():
        raise ThetaDependenceError(f"pairing for mu={E.mu} keeps a power of t: {value}")
    exact = value.rational_part()
    series, numeric = [], None
    if mode in ("numeric", "both"):
        result = tr.numeric(trace_poly, N, ladder)
        series, numeric = result.series, float(result)
    return PairingReport(E.mu, E.params, exact, series, numeric, dict(E.meta))


@dataclass
class SignWitness:
    mirror: Tuple[int, int]
    podles: Tuple[int, int]
    raw: dict
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def sign_witness(params: Params = Params(), N: int = 64, power: int = 64) -> SignWitness:
    """Traces of the two minimal projections under each Fredholm module.

    Each projection is the spectral projection at eigenvalue 1 of E, F
    (mirror) or P, Q (Podles) in the two representations of the module.  The
    residual compares the rounded value with the trace of the polynomial
    approximant ``X^power``, which converges to the same projection.
    """
    M, Pd = mirror_sphere(params), podles_sphere(params)
    interlaced, symbol = build_interlaced(params, N), build_symbol_bilateral(N, params)
    rho1, rho2 = build_podles_pair(params, N)
    raw, residuals = {}, {}

    def witness(tag, letter, pres, first, second, kind):
        x = pres.gen(letter)
        e1 = spectral_projection(evaluate(x, first), 1.0)
        e2 = spectral_projection(evaluate(x, second), 1.0)
        value = float(np.real(e1.trace() - e2.trace()))
        approx = float(tr_numeric(pres.gen(letter) ** power, N, params, kind))
        rounded = int(round(value))
        raw[tag] = value
        residuals[tag] = max(abs(value - rounded), abs(approx - rounded))
        return rounded

    mirror_pair = (
        witness("mirror_e1", "E", M, interlaced, symbol, "mirror"),
        witness("mirror_e2", "F", M, interlaced, symbol, "mirror"),
    )
    podles_pair = (
        witness("podles_e1", "P", Pd, rho1, rho2, "podles"),
        witness("podles_e2", "Q", Pd, rho1, rho2, "podles"),
    )
    return SignWitness(mirror_pair, podles_pair, raw, residuals)
