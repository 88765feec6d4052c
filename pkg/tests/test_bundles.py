from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PARAMS_T
from qspheres.bundles import (
    IdempotentMatrix,
    build_idempotent,
    build_RL,
    gaussian_binomial,
    lens_idempotent,
    torus_freeness_witness,
    torus_module_coordinates,
    verify_idempotent,
)
from qspheres.chern import pairing
from qspheres.errors import PreconditionError

fractions = st.builds(Fraction, st.integers(1, 9), st.integers(10, 20))


def test_gaussian_binomial_examples():
    assert gaussian_binomial(2, 1, Fraction(1, 3)) == Fraction(4, 3)
    assert gaussian_binomial(4, 2, Fraction(1, 2)) == Fraction(35, 16)
    assert gaussian_binomial(5, 2, 1) == 10
    assert gaussian_binomial(3, 0, Fraction(1, 2)) == 1
    with pytest.raises(PreconditionError):
        gaussian_binomial(2, 3, Fraction(1, 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.data(), fractions)
def test_gaussian_binomial_pascal_and_symmetry(n, data, x):
    k = data.draw(st.integers(1, n))
    assert gaussian_binomial(n, k, x) == gaussian_binomial(n, n - k, x)
    if k < n:
        lhs = gaussian_binomial(n, k, x)
        assert lhs == gaussian_binomial(n - 1, k - 1, x) + x**k * gaussian_binomial(n - 1, k, x)


def test_gaussian_binomial_limit_at_one():
    near = gaussian_binomial(6, 3, Fraction(999999, 1000000))
    assert abs(float(near) - 20) < 1e-3


@pytest.mark.parametrize("mu", [-2, 2])
def test_middle_coefficient_solved_from_partition_of_unity(mu, H):
    # solve sum_i L_i R_i = 1 for the middle coefficient without the closed form
    pair = build_RL(mu, PARAMS_T, H)
    x = PARAMS_T.p if mu < 0 else PARAMS_T.q
    c0 = gaussian_binomial(2, 1, x)
    rest = H.normal_form(pair.L[0] * pair.R[0] + pair.L[2] * pair.R[2])
    middle = H.normal_form(pair.L[1] * pair.R[1] * H.scalar(1 / c0))
    residual = H.one() - rest
    word, coeff = next(iter(middle.terms.items()))
    solved = residual.coefficient(word) * coeff.inverse()
    assert solved == 1 + x
    assert H.equals(residual, middle * H.scalar(solved))


def test_rl_examples(H):
    pair = build_RL(-1, PARAMS_T, H)
    assert pair.R == [H.parse("b"), H.parse("a")]
    p = PARAMS_T.p
    assert H.equals(pair.L[0], H.parse(f"{p} (1 - a a') b'"))
    assert H.equals(pair.L[1], H.parse("a'"))
    pair = build_RL(1, PARAMS_T, H)
    assert pair.R == [H.parse("b'"), H.parse("a'")]
    assert H.equals(pair.L[1], H.parse("(1 - b b') a"))
    with pytest.raises(PreconditionError):
        build_RL(0, PARAMS_T, H)


@pytest.mark.parametrize("mu", [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5])
def test_partition_of_unity(mu, H):
    assert build_RL(mu, PARAMS_T, H).partition_of_unity(H) == H.one()


def test_rl_degrees(H):
    for mu in (-3, 2):
        pair = build_RL(mu, PARAMS_T, H)
        assert all(r.degree("mirror") == -mu for r in pair.R)
        assert all(l.degree("mirror") == mu for l in pair.L)


def test_idempotent_examples(M, H):
    E0 = build_idempotent(0, PARAMS_T, H, M)
    assert E0.size == 1 and E0[0, 0] == M.one()
    E1 = build_idempotent(1, PARAMS_T, H, M)
    assert E1.size == 2
    q = PARAMS_T.q
    # E_00 = b'b = 1 - qF and E_11 = a'(1 - bb')a = (1 - pE)F = F
    assert E1[0, 0] == M.parse(f"1 - {q} F")
    assert E1[1, 1] == M.parse("F")
    assert E1[1, 0] == M.parse("C'")


@pytest.mark.parametrize("mu", [-5, -3, -1, 0, 1, 2, 4, 5])
def test_idempotent_squares_to_itself(mu, M, H):
    E = build_idempotent(mu, PARAMS_T, H, M)
    assert E.size == abs(mu) + 1
    assert verify_idempotent(E, M)


def test_verify_idempotent_detects_mutation(M, H):
    E = build_idempotent(2, PARAMS_T, H, M)
    entries = [row[:] for row in E.entries]
    entries[0][1] = entries[0][1] + M.parse("E")
    assert not verify_idempotent(IdempotentMatrix(entries, 2, PARAMS_T), M)
    entries = [row[:] for row in E.entries]
    entries[2][2] = entries[2][2] * M.scalar(2)
    assert not verify_idempotent(IdempotentMatrix(entries, 2, PARAMS_T), M)


def test_adjoint_idempotent_has_the_same_index(M, H):
    E = build_idempotent(-2, PARAMS_T, H, M)
    tr = E.trace_polynomial(M)
    adj = IdempotentMatrix([[E[j, i].star() for j in range(E.size)] for i in range(E.size)], -2, PARAMS_T)
    assert verify_idempotent(adj, M)
    assert pairing(adj, mode="exact").exact == pairing(E, mode="exact").exact
    assert tr.degree("mirror") == 0


@pytest.mark.parametrize("n, mu", [(2, 1), (2, -2), (3, 1), (3, -1), (2, 0)])
def test_lens_idempotent(n, mu, M, H):
    E = lens_idempotent(n, mu, PARAMS_T, heegaard=H, mirror=M)
    assert E.meta == {"n": n, "mu": mu}
    assert E.size == abs(n * mu) + 1
    assert verify_idempotent(E, M)
    assert pairing(E, mode="exact").exact == n * mu


def test_lens_rejects_bad_order():
    with pytest.raises(PreconditionError):
        lens_idempotent(0, 1, PARAMS_T)


@pytest.mark.parametrize("mu", [-3, -1, 0, 2, 3])
def test_torus_witness(mu, T):
    w = torus_freeness_witness(mu, PARAMS_T, T)
    assert w.unitary
    assert w.degree == mu


def test_torus_module_coordinates(T):
    x = T.parse("2 V U^2 + t V' U^2")
    c, back = torus_module_coordinates(x, 2, PARAMS_T, T)
    assert c.degree("torus") == 0
    assert back == T.normal_form(x)
