import json
import random

from conftest import PARAMS_T, SEED, random_poly
from qspheres.bundles import build_idempotent, lens_idempotent
from qspheres.ncpoly import Scalar
from qspheres.serialize import (
    dumps,
    idempotent_from_json,
    idempotent_to_json,
    poly_from_json,
    poly_to_json,
    rows_to_csv,
    scalar_from_json,
    scalar_to_json,
)


def test_scalar_round_trip():
    s = Scalar({0: 2, 3: -1}, 4) * Scalar.rational(1, 4) * 3
    assert scalar_from_json(scalar_to_json(s), 4) == s


def test_poly_round_trip(M, H):
    rng = random.Random(SEED)
    for P in (M, H):
        for _ in range(20):
            x = random_poly(rng, P, 4)
            data = json.loads(dumps(poly_to_json(x)))
            assert poly_from_json(data, P.alphabet, PARAMS_T) == x


def test_idempotent_round_trip(M):
    E = build_idempotent(-2, PARAMS_T, mirror=M)
    back = idempotent_from_json(json.loads(dumps(idempotent_to_json(E))))
    assert back.mu == -2 and back.entries == E.entries
    L = lens_idempotent(2, 1, PARAMS_T, mirror=M)
    assert idempotent_from_json(idempotent_to_json(L)).meta == {"n": 2, "mu": 1}


def test_dumps_is_deterministic():
    a = dumps({"b": 0.1, "a": [1, 2.5e-17]})
    b = dumps({"a": [1, 2.5e-17], "b": 0.1})
    assert a == b
    assert "0.10000000000000001" in a
    assert json.loads(a)["b"] == 0.1


def test_rows_to_csv():
    text = rows_to_csv(["x", "y"], [[1, 0.5], [2, 0.25]])
    assert text.splitlines() == ["x,y", "1,0.5", "2,0.25"]
