"""Truncated sparse realizations of the sphere representations.

Operators live on a finite window of basis vectors: the N-window ``0..N`` for
a single Toeplitz-type representation, or the Z-window ``-N..N`` for the
interlaced and bilateral (symbol) representations.  Products of truncated
matrices are exact only away from the window edge, so every comparison is
restricted to the *interior band*.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import ConfigurationError, PreconditionError
from .ncpoly import Alphabet, NcPoly, Params, Word
from .rewrite import MIRROR_ALPHABET, PODLES_ALPHABET, Presentation


@dataclass(frozen=True)
class BasisWindow:
    kind: str  # "N" or "Z"
    size: int

    def __post_init__(self):
        if self.kind not in ("N", "Z"):
            raise ConfigurationError(f"window kind must be 'N' or 'Z', got {self.kind!r}")
        if self.size < 4:
            raise ConfigurationError(f"window size must be >= 4, got {self.size}")

    @property
    def dim(self) -> int:
        return self.size + 1 if self.kind == "N" else 2 * self.size + 1

    @property
    def labels(self) -> np.ndarray:
        lo = 0 if self.kind == "N" else -self.size
        return np.arange(lo, self.size + 1)

    def position(self, label: int) -> int:
        lo = 0 if self.kind == "N" else -self.size
        if not lo <= label <= self.size:
            raise PreconditionError(f"index {label} outside window [{lo}, {self.size}]")
        return label - lo

    def interior(self, margin: int) -> np.ndarray:
        """Matrix positions at distance > margin from every truncation edge.

        Index 0 of an N-window is a genuine boundary of the basis, not a cut.
        """
        labels = self.labels
        keep = self.size - labels > margin
        if self.kind == "Z":
            keep &= labels + self.size > margin
        return np.nonzero(keep)[0]


@dataclass
class TruncatedOperator:
    window: BasisWindow
    matrix: sp.csr_matrix
    rep_tag: str = ""

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.window != other.window:
            raise ConfigurationError("operators live on different windows")
        return TruncatedOperator(self.window, (self.matrix - other.matrix).tocsr(), self.rep_tag)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if self.window != other.window:
            raise ConfigurationError("operators live on different windows")
        return TruncatedOperator(self.window, (self.matrix @ other.matrix).tocsr(), self.rep_tag)

    def adjoint(self) -> "TruncatedOperator":
        return TruncatedOperator(self.window, self.matrix.conj().T.tocsr(), self.rep_tag)

    def entry(self, row: int, col: int):
        return self.matrix[self.window.position(row), self.window.position(col)]

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def interior_block(self, margin: int) -> np.ndarray:
        idx = self.window.interior(margin)
        return self.matrix[idx][:, idx].toarray()

    def interior_max(self, margin: int) -> float:
        block = self.interior_block(margin)
        return float(np.abs(block).max()) if block.size else 0.0

    def trace(self) -> complex:
        return self.matrix.diagonal().sum()

    # export
    def to_json(self) -> dict:
        coo = self.matrix.tocoo()
        labels = self.window.labels
        entries = []
        for r, c, v in sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())):
            v = complex(v)
            entries.append([int(labels[r]), int(labels[c]), v.real, v.imag])
        return {
            "rep": self.rep_tag,
            "window": {"kind": self.window.kind, "size": self.window.size},
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncatedOperator":
        window = BasisWindow(data["window"]["kind"], int(data["window"]["size"]))
        lo = window.labels[0]
        rows, cols, vals = [], [], []
        for r, c, re, im in data["entries"]:
            rows.append(r - lo)
            cols.append(c - lo)
            vals.append(complex(re, im))
        dtype = complex if any(v.imag for v in vals) else float
        vals = np.array(vals, dtype=complex)
        if dtype is float:
            vals = vals.real
        m = sp.csr_matrix((vals, (rows, cols)), shape=(window.dim, window.dim))
        return cls(window, m, data.get("rep", ""))

    def to_matrix_market(self) -> str:
        buf = io.BytesIO()
        comment = f" rep={self.rep_tag} window={self.window.kind}:{self.window.size}"
        scipy.io.mmwrite(buf, self.matrix.tocoo(), comment=comment)
        return buf.getvalue().decode()


@dataclass
class RepAssignment:
    """Operators for every letter of an alphabet on a common window."""

    tag: str
    window: BasisWindow
    alphabet: Alphabet
    params: Params
    operators: Dict[str, sp.csr_matrix] = field(default_factory=dict)

    def __post_init__(self):
        for g in self.alphabet.generators:
            if g not in self.operators:
                raise ConfigurationError(f"representation {self.tag} lacks generator {g}")
            if g not in self.alphabet.self_adjoint:
                self.operators[g + "'"] = self.operators[g].conj().T.tocsr()

    def __getitem__(self, letter: str) -> TruncatedOperator:
        return TruncatedOperator(self.window, self.operators[letter], self.tag)

    def identity(self) -> sp.csr_matrix:
        return sp.identity(self.window.dim, format="csr")


def _shift(window: BasisWindow, weights: Mapping[int, float], step: int) -> sp.csr_matrix:
    """Weighted shift ``e_j -> w_j e_{j+step}``; vectors leaving the window are dropped."""
    lo = window.labels[0]
    rows, cols, vals = [], [], []
    for j, w in weights.items():
        if w == 0:
            continue
        target = j + step
        if lo <= target <= window.size and lo <= j <= window.size:
            rows.append(target - lo)
            cols.append(j - lo)
            vals.append(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(window.dim, window.dim), dtype=float)


def _diag(window: BasisWindow, values: Mapping[int, float]) -> sp.csr_matrix:
    lo = window.labels[0]
    d = np.zeros(window.dim)
    for j, v in values.items():
        d[j - lo] = v
    return sp.diags(d, format="csr")


def build_rho_plus(params: Params, N: int) -> RepAssignment:
    """C xi_k = sqrt(1 - p^(k+1)) xi_(k+1), E = diag(p^k), F = 0."""
    w = BasisWindow("N", N)
    p = float(params.p)
    ks = range(N + 1)
    ops = {
        "C": _shift(w, {k: np.sqrt(1 - p ** (k + 1)) for k in ks}, +1),
        "E": _diag(w, {k: p**k for k in ks}),
        "F": _diag(w, {}),
    }
    return RepAssignment("rho_plus", w, MIRROR_ALPHABET, params, ops)


def build_rho_minus(params: Params, N: int) -> RepAssignment:
    """C xi_k = sqrt(1 - q^k) xi_(k-1), E = 0, F = diag(q^k)."""
    w = BasisWindow("N", N)
    q = float(params.q)
    ks = range(N + 1)
    ops = {
        "C": _shift(w, {k: np.sqrt(1 - q**k) for k in ks}, -1),
        "E": _diag(w, {}),
        "F": _diag(w, {k: q**k for k in ks}),
    }
    return RepAssignment("rho_minus", w, MIRROR_ALPHABET, params, ops)


def build_interlaced(params: Params, N: int) -> RepAssignment:
    """rho_plus on j >= 0 (xi_k -> e_k) and rho_minus on j < 0 (xi_k -> e_(-k-1)).

    C becomes one bilateral up-shift whose weights approach 1 geometrically in |j|.
    """
    w = BasisWindow("Z", N)
    p, q = float(params.p), float(params.q)
    weights = {}
    for j in range(-N, N + 1):
        weights[j] = np.sqrt(1 - p ** (j + 1)) if j >= 0 else np.sqrt(1 - q ** (-j - 1))
    ops = {
        "C": _shift(w, weights, +1),
        "E": _diag(w, {j: p**j for j in range(0, N + 1)}),
        "F": _diag(w, {j: q ** (-j - 1) for j in range(-N, 0)}),
    }
    return RepAssignment("interlaced", w, MIRROR_ALPHABET, params, ops)


def build_symbol_bilateral(N: int, params: Params = Params()) -> RepAssignment:
    """Direct integral of the characters C -> lambda: the unweighted bilateral shift, E = F = 0."""
    w = BasisWindow("Z", N)
    ops = {
        "C": _shift(w, {j: 1.0 for j in range(-N, N + 1)}, +1),
        "E": _diag(w, {}),
        "F": _diag(w, {}),
    }
    return RepAssignment("symbol", w, MIRROR_ALPHABET, params, ops)


def build_podles_pair(params: Params, N: int) -> Tuple[RepAssignment, RepAssignment]:
    """rho_1: D weights sqrt(1 - p^(k+1)), P = diag(p^k), Q = 0; rho_2 the same with q and Q."""
    w = BasisWindow("N", N)
    p, q = float(params.p), float(params.q)
    ks = range(N + 1)
    rho1 = RepAssignment(
        "rho_1",
        w,
        PODLES_ALPHABET,
        params,
        {
            "D": _shift(w, {k: np.sqrt(1 - p ** (k + 1)) for k in ks}, +1),
            "P": _diag(w, {k: p**k for k in ks}),
            "Q": _diag(w, {}),
        },
    )
    rho2 = RepAssignment(
        "rho_2",
        w,
        PODLES_ALPHABET,
        params,
        {
            "D": _shift(w, {k: np.sqrt(1 - q ** (k + 1)) for k in ks}, +1),
            "P": _diag(w, {}),
            "Q": _diag(w, {k: q**k for k in ks}),
        },
    )
    return rho1, rho2


def character(x: NcPoly, lam: complex, params: Params = Params()) -> complex:
    """One-dimensional representation C -> lam, E, F -> 0 (|lam| = 1)."""
    if x.alphabet != MIRROR_ALPHABET:
        raise ConfigurationError("characters are defined on the mirror sphere")
    values = {"C": lam, "C'": np.conj(lam), "E": 0.0, "F": 0.0}
    total = 0j
    for w, c in x.terms.items():
        v = c.to_complex(params.theta)
        for letter in w:
            v *= values[letter]
        total += v
    return total


def evaluate(x: NcPoly, R: RepAssignment) -> TruncatedOperator:
    """Image of a polynomial: words become products of the letter matrices."""
    if x.alphabet != R.alphabet:
        raise ConfigurationError(
            f"polynomial over {x.alphabet.name} cannot be evaluated in {R.tag} ({R.alphabet.name})"
        )
    theta = R.params.theta
    dim = R.window.dim
    products: Dict[Word, sp.csr_matrix] = {(): R.identity()}

    def word_matrix(w: Word) -> sp.csr_matrix:
        m = products.get(w)
        if m is None:
            m = (word_matrix(w[:-1]) @ R.operators[w[-1]]).tocsr()
            products[w] = m
        return m

    total = sp.csr_matrix((dim, dim), dtype=complex)
    real = True
    for w, c in x.terms.items():
        if c.is_rational():
            coeff = float(c.rational_part())
        else:
            coeff = c.to_complex(theta)
            real = False
        total = total + coeff * word_matrix(w)
    total = total.tocsr()
    if real:
        total = total.real.tocsr()
    total.eliminate_zeros()
    return TruncatedOperator(R.window, total, R.tag)


def relation_residual(P: Presentation, R: RepAssignment, max_len: int = 4) -> float:
    """Largest interior-band magnitude of ``lhs - rhs`` over the defining relations."""
    worst = 0.0
    relations = P.relations(max_len)
    margin = max(max(l.max_word_length(), r.max_word_length()) for l, r in relations)
    for lhs, rhs in relations:
        worst = max(worst, evaluate(lhs - rhs, R).interior_max(margin))
    return worst


def rank_one_projection(R: RepAssignment, index: int) -> TruncatedOperator:
    """Orthogonal projection onto the basis vector labelled ``index``."""
    pos = R.window.position(index)
    m = sp.csr_matrix(([1.0], ([pos], [pos])), shape=(R.window.dim, R.window.dim))
    return TruncatedOperator(R.window, m, R.tag)


def spectral_projection(op: TruncatedOperator, value: float, tol: float = 1e-12) -> TruncatedOperator:
    """Projection onto the eigenspace of a diagonal operator at ``value``."""
    offdiag = op.matrix - sp.diags(op.diagonal())
    if offdiag.count_nonzero() and abs(offdiag).max() > tol:
        raise PreconditionError("spectral_projection needs a diagonal operator")
    hits = np.abs(op.diagonal() - value) < tol
    m = sp.diags(hits.astype(float), format="csr")
    m.eliminate_zeros()
    return TruncatedOperator(op.window, m, op.rep_tag)
