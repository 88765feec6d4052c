"""Line-bundle idempotents over the mirror sphere, lens modules, torus freeness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ConfigurationError, IdempotentConstructionError, PreconditionError
from .ncpoly import NcPoly, Params, Rationalish, as_fraction
from .rewrite import (
    Presentation,
    descend,
    heegaard_sphere,
    mirror_sphere,
    quantum_torus,
    spectral_component,
)


def gaussian_binomial(n: int, k: int, x: Rationalish) -> Fraction:
    """``prod_{i=1..k} (1 - x^(n-i+1)) / (1 - x^i)``; the ordinary binomial at x = 1."""
    if not 0 <= k <= n:
        raise PreconditionError(f"gaussian_binomial needs 0 <= k <= n, got n={n}, k={k}")
    x = as_fraction(x)
    if x == 1:
        return Fraction(math.comb(n, k))
    out = Fraction(1)
    for i in range(1, k + 1):
        out *= (1 - x ** (n - i + 1)) / (1 - x**i)
    return out


@dataclass
class RLPair:
    """Rows R, L over the 3-sphere with ``sum_i L_i R_i = 1`` and ``E = R^T L``."""

    R: List[NcPoly]
    L: List[NcPoly]
    mu: int

    def partition_of_unity(self, heegaard: Presentation) -> NcPoly:
        total = heegaard.zero()
        for left, right in zip(self.L, self.R):
            total = total + left * right
        return heegaard.normal_form(total)


def build_RL(mu: int, params: Params = Params(), heegaard: Optional[Presentation] = None) -> RLPair:
    """Rows of the strong-connection idempotent for the degree ``mu`` line bundle.

    For mu < 0 (n = |mu|): ``R_i = a^i b^(n-i)`` and
    ``L_i = binom(n, i)_p p^(n-i) A^(n-i) b'^(n-i) a'^i``.
    For mu > 0: ``R_i = a'^i b'^(mu-i)`` and ``L_i = binom(mu, i)_q b^(mu-i) B^i a^i``.
    Here ``A = 1 - aa'`` and ``B = 1 - bb'``.
    """
    if mu == 0:
        raise PreconditionError("build_RL needs mu != 0; E_0 is the 1x1 identity")
    H = heegaard or heegaard_sphere(params)
    p, q = H.params.p, H.params.q
    one = H.one()
    A = one - H.word(("a", "a'"))
    B = one - H.word(("b", "b'"))
    n = abs(mu)
    R, L = [], []
    for i in range(n + 1):
        if mu < 0:
            R.append(H.word(("a",) * i + ("b",) * (n - i)))
            coeff = gaussian_binomial(n, i, p) * p ** (n - i)
            L.append(A ** (n - i) * H.word(("b'",) * (n - i) + ("a'",) * i, coeff))
        else:
            R.append(H.word(("a'",) * i + ("b'",) * (n - i)))
            coeff = gaussian_binomial(n, i, q)
            L.append(H.word(("b",) * (n - i), coeff) * B**i * H.word(("a",) * i))
    return RLPair(R, L, mu)


@dataclass
class IdempotentMatrix:
    """Square matrix of mirror-sphere canonical forms."""

    entries: List[List[NcPoly]]
    mu: int
    params: Params
    meta: Dict[str, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, index):
        i, j = index
        return self.entries[i][j]

    def trace_polynomial(self, mirror: Optional[Presentation] = None) -> NcPoly:
        M = mirror or mirror_sphere(self.params)
        total = M.zero()
        for i in range(self.size):
            total = total + self.entries[i][i]
        return M.normal_form(total)

    def matmul(self, other: "IdempotentMatrix", mirror: Presentation) -> List[List[NcPoly]]:
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = mirror.zero()
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(mirror.normal_form(acc))
            out.append(row)
        return out


def build_idempotent(
    mu: int,
    params: Params = Params(),
    heegaard: Optional[Presentation] = None,
    mirror: Optional[Presentation] = None,
) -> IdempotentMatrix:
    """``E_mu = R^T L`` with entries descended to the mirror sphere."""
    H = heegaard or heegaard_sphere(params)
    M = mirror or mirror_sphere(params)
    if mu == 0:
        return IdempotentMatrix([[M.one()]], 0, params)
    pair = build_RL(mu, params, H)
    entries = []
    for i, r in enumerate(pair.R):
        row = []
        for j, l in enumerate(pair.L):
            lifted = H.normal_form(r * l)
            if lifted.degree("mirror") != 0:
                raise IdempotentConstructionError(
                    f"entry ({i}, {j}) of E_{mu} has nonzero degree; R/L rows are broken"
                )
            row.append(descend(lifted, H, M))
        entries.append(row)
    return IdempotentMatrix(entries, mu, params)


def verify_idempotent(E: IdempotentMatrix, mirror: Optional[Presentation] = None) -> bool:
    """True iff every entry of ``E E - E`` reduces to zero."""
    M = mirror or mirror_sphere(E.params)
    square = E.matmul(E, M)
    return all(
        not M.normal_form(square[i][j] - E.entries[i][j])
        for i in range(E.size)
        for j in range(E.size)
    )


def lens_idempotent(n: int, mu: int, params: Params = Params(), **presentations) -> IdempotentMatrix:
    """Idempotent of the degree-mu module over the order-n lens space, i.e. ``E_{n mu}``."""
    if n <= 0:
        raise PreconditionError(f"lens order must be positive, got {n}")
    if mu != 0:
        H = presentations.get("heegaard") or heegaard_sphere(params)
        presentations["heegaard"] = H
        pair = build_RL(n * mu, params, H)
        for row in (pair.R, pair.L):
            for x in row:
                d = x.degree("mirror")
                if d is None or d % n or spectral_component(x, d) != x:
                    raise IdempotentConstructionError(
                        "lens generator outside the Z_n-invariant subalgebra"
                    )
    E = build_idempotent(n * mu, params, **presentations)
    E.meta = {"n": n, "mu": mu}
    return E


@dataclass
class TorusWitness:
    generator: NcPoly
    mu: int
    unitary: bool
    degree: int


def torus_freeness_witness(mu: int, params: Params = Params(), torus: Optional[Presentation] = None) -> TorusWitness:
    """Unitary generator ``U^mu`` of the degree-mu spectral subspace of the quantum torus."""
    T = torus or quantum_torus(params)
    u = T.word(("U",) * mu if mu >= 0 else ("U'",) * (-mu))
    one = T.one()
    unitary = T.equals(u * u.star(), one) and T.equals(u.star() * u, one)
    return TorusWitness(u, mu, unitary, u.degree("torus"))


def torus_module_coordinates(x: NcPoly, mu: int, params: Params = Params(), torus: Optional[Presentation] = None):
    """Write a degree-mu torus element as ``c U^mu`` with ``c`` of degree 0.

    Returns ``(c, reconstructed)``; ``reconstructed`` equals ``x`` in normal form.
    """
    T = torus or quantum_torus(params)
    u = torus_freeness_witness(mu, params, T).generator
    c = T.normal_form(x * u.star())
    return c, T.normal_form(c * u)
