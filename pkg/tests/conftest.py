import random
from fractions import Fraction

import pytest

from qspheres.ncpoly import NcPoly, Params, Scalar
from qspheres.rewrite import heegaard_sphere, mirror_sphere, podles_sphere, quantum_torus

SEED = 20070901

PARAMS = Params(Fraction(1, 2), Fraction(1, 3), Fraction(0))
PARAMS_T = Params(Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))


@pytest.fixture(scope="session")
def params():
    return PARAMS


@pytest.fixture(scope="session")
def params_t():
    return PARAMS_T


@pytest.fixture(scope="session")
def M():
    return mirror_sphere(PARAMS_T)


@pytest.fixture(scope="session")
def H():
    return heegaard_sphere(PARAMS_T)


@pytest.fixture(scope="session")
def Pd():
    return podles_sphere(PARAMS_T)


@pytest.fixture(scope="session")
def T():
    return quantum_torus(PARAMS_T)


def random_scalar(rng, modulus, max_coeff=10):
    terms = {}
    for _ in range(rng.randint(1, 2)):
        terms[rng.randrange(modulus)] = Fraction(rng.randint(-max_coeff, max_coeff), rng.randint(1, 3))
    s = Scalar(terms, modulus)
    return s if s else Scalar.rational(1, modulus)


def random_word(rng, presentation, max_len):
    letters = sorted(presentation.alphabet.letters)
    return tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))


def random_poly(rng, presentation, max_len=6, max_terms=4, max_coeff=10, phases=True):
    modulus = presentation.modulus if phases else 1
    out = presentation.zero()
    for _ in range(rng.randint(1, max_terms)):
        w = random_word(rng, presentation, max_len)
        if phases:
            c = random_scalar(rng, presentation.modulus, max_coeff)
        else:
            c = Scalar.rational(rng.randint(-max_coeff, max_coeff) or 1, presentation.modulus)
        out = out + NcPoly({w: c}, presentation.alphabet, presentation.modulus)
    return out


@pytest.fixture
def rng():
    return random.Random(SEED)
