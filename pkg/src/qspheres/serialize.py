"""Canonical JSON/CSV emission."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Any, List, Mapping, Sequence

from .bundles import IdempotentMatrix
from .errors import ConfigurationError
from .expr import parse, to_text
from .ncpoly import Alphabet, NcPoly, Params, Scalar, format_word
from .rewrite import MIRROR_ALPHABET


def scalar_to_json(c: Scalar) -> List[dict]:
    return [
        {"num": v.numerator, "den": v.denominator, "texp": e} for e, v in sorted(c.terms.items())
    ]


def scalar_from_json(data: Sequence[Mapping], modulus: int) -> Scalar:
    return Scalar({int(d["texp"]): Fraction(int(d["num"]), int(d["den"])) for d in data}, modulus)


def poly_to_json(x: NcPoly) -> dict:
    return {format_word(w): scalar_to_json(c) for w, c in x.terms.items()}


def poly_from_json(data: Mapping, alphabet: Alphabet, params: Params) -> NcPoly:
    out = NcPoly.zero(alphabet, params.modulus)
    for key, coeff in data.items():
        word = parse(key, alphabet, params)
        out = out + word * NcPoly.constant(scalar_from_json(coeff, params.modulus), alphabet, params.modulus)
    return out


def idempotent_to_json(E: IdempotentMatrix) -> dict:
    return {
        "mu": E.mu,
        "lens": dict(E.meta) or None,
        "params": E.params.as_dict(),
        "size": E.size,
        "entries": [[to_text(x) for x in row] for row in E.entries],
    }


def idempotent_from_json(data: Mapping) -> IdempotentMatrix:
    try:
        params = Params(**data["params"])
        rows = data["entries"]
        mu = int(data["mu"])
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed idempotent JSON: {exc}") from None
    entries = [[parse(text, MIRROR_ALPHABET, params) for text in row] for row in rows]
    if any(len(row) != len(entries) for row in entries):
        raise ConfigurationError("idempotent matrix must be square")
    meta = {k: int(v) for k, v in (data.get("lens") or {}).items()}
    return IdempotentMatrix(entries, mu, params, meta)


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, floats in fixed 17-significant-digit form."""
    floats: List[float] = []

    def walk(o):
        if isinstance(o, bool) or o is None or isinstance(o, (int, str)):
            return o
        if isinstance(o, float):
            floats.append(o)
            return f"@@float{len(floats) - 1}@@"
        if isinstance(o, Fraction):
            return f"{o.numerator}/{o.denominator}"
        if isinstance(o, Mapping):
            return {str(k): walk(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [walk(v) for v in o]
        if hasattr(o, "item"):
            return walk(o.item())
        raise TypeError(f"cannot serialize {type(o).__name__}")

    text = json.dumps(walk(obj), sort_keys=True, indent=2)
    for i, v in enumerate(floats):
        if math.isfinite(v):
            rendered = format(v, ".17g")
            if not any(ch in rendered for ch in ".en"):
                rendered += ".0"
        else:
            rendered = "null"
        text = text.replace(f'"@@float{i}@@"', rendered, 1)
    return text


def rows_to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()
