"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import io
import itertools
import json
import random
import time
from fractions import Fraction

import pytest

from conftest import SEED, random_poly
from qspheres.bundles import (
    build_idempotent,
    build_RL,
    lens_idempotent,
    torus_freeness_witness,
    verify_idempotent,
)
from qspheres.chern import TraceFunctional, pairing, sign_witness, summability_report
from qspheres.cli import main
from qspheres.ncpoly import Params
from qspheres.rep import (
    build_interlaced,
    build_podles_pair,
    build_rho_minus,
    build_rho_plus,
    build_symbol_bilateral,
    relation_residual,
)
from qspheres.rewrite import (
    PRESETS,
    check_local_confluence,
    descend,
    heegaard_sphere,
    lift,
    mirror_sphere,
    podles_sphere,
    preset,
    quantum_torus,
)

pytestmark = pytest.mark.acceptance

BASE = Params(Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))
WIDE = Params(Fraction(2, 3), Fraction(2, 3), Fraction(1, 3))


@pytest.fixture
def report(capsys, request):
    def emit(ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {request.node.name}: {detail}")
        assert ok, detail

    return emit


def _cli_exact_pairing(mu, theta):
    out = io.StringIO()
    code = main(["pair", "--mode", "exact", "--p", "1/2", "--q", "1/3", "--theta", theta, f"--mu={mu}"], out)
    return code, json.loads(out.getvalue())["result"]["exact"]


def test_01_exact_pairing_equals_degree(report):
    start = time.perf_counter()
    bad = []
    for theta in ("0", "1/4"):
        for mu in range(-4, 5):
            code, value = _cli_exact_pairing(mu, theta)
            if code != 0 or value != f"{mu}/1":
                bad.append((theta, mu, value))
    elapsed = time.perf_counter() - start
    report(not bad and elapsed < 120, f"mismatches={bad} elapsed={elapsed:.1f}s")


def test_02_numeric_pairing_converges(report):
    worst, stalled = 0.0, []
    for params in (BASE, WIDE):
        M, H = mirror_sphere(params), heegaard_sphere(params)
        tr = TraceFunctional("mirror", params)
        for mu in range(-3, 4):
            rep = pairing(build_idempotent(mu, params, H, M), tr, mode="both", N=80)
            worst = max(worst, abs(rep.numeric - mu))
            if not rep.geometric_beyond(20):
                stalled.append((str(params.p), mu))
    report(worst < 1e-8 and not stalled, f"max |numeric - mu| = {worst:.2e} at N=80, stalled={stalled}")


def test_03_partition_of_unity_and_idempotency(report):
    M, H = mirror_sphere(BASE), heegaard_sphere(BASE)
    bad = []
    for mu in range(-5, 6):
        if mu and build_RL(mu, BASE, H).partition_of_unity(H) != H.one():
            bad.append(("RL", mu))
        if not verify_idempotent(build_idempotent(mu, BASE, H, M), M):
            bad.append(("E^2", mu))
    report(not bad, f"failures={bad} for |mu| <= 5")


def test_04_representation_residuals(report):
    N = 64
    M, Pd = mirror_sphere(BASE), podles_sphere(BASE)
    rho1, rho2 = build_podles_pair(BASE, N)
    pairs = [
        (M, build_rho_plus(BASE, N)),
        (M, build_rho_minus(BASE, N)),
        (M, build_interlaced(BASE, N)),
        (M, build_symbol_bilateral(N, BASE)),
        (Pd, rho1),
        (Pd, rho2),
    ]
    residuals = {R.tag: relation_residual(P, R) for P, R in pairs}
    worst = max(residuals.values())
    report(worst < 1e-12, f"max residual {worst:.2e} over {sorted(residuals)}")


def test_05_summability_ratio(report):
    rows = []
    ok = True
    for params in (BASE, WIDE):
        M = mirror_sphere(params)
        for letter in ("C", "E", "F"):
            rep = summability_report(M.gen(letter), 64, params)
            rows.append(f"{letter}@{params.p}/{params.q}:{rep.ratio:.3f}<={rep.bound:.3f}")
            ok &= rep.ok
    report(ok, " ".join(rows))


def test_06_lens_pairing(report):
    M, H = mirror_sphere(BASE), heegaard_sphere(BASE)
    tr = TraceFunctional("mirror", BASE)
    bad = []
    for n in (2, 3):
        for mu in range(-2, 3):
            E = lens_idempotent(n, mu, BASE, heegaard=H, mirror=M)
            value = pairing(E, tr, mode="exact").exact
            if value != n * mu:
                bad.append((n, mu, str(value)))
    report(not bad, f"mismatches={bad} for n in (2, 3), mu in -2..2")


def test_07_torus_freeness_versus_sphere(report):
    T = quantum_torus(BASE)
    M, H = mirror_sphere(BASE), heegaard_sphere(BASE)
    bad = []
    for mu in range(-3, 4):
        w = torus_freeness_witness(mu, BASE, T)
        if not (w.unitary and w.degree == mu):
            bad.append(("torus", mu))
        if mu and pairing(build_idempotent(mu, BASE, H, M), mode="exact").exact == 0:
            bad.append(("sphere", mu))
    report(not bad, f"failures={bad}")


def test_08_sign_witness(report):
    w = sign_witness(BASE, N=64)
    ok = w.mirror == (1, 1) and w.podles == (1, -1) and w.max_residual < 1e-10
    report(ok, f"mirror={w.mirror} podles={w.podles} residual={w.max_residual:.2e}")


def _degree_zero_canonical(max_len):
    out = []
    for i, j, k, l in itertools.product(range(max_len + 1), repeat=4):
        if i + j + k + l <= max_len and i - j + k - l == 0 and not (min(i, j) and min(k, l)):
            out.append(("a",) * i + ("a'",) * j + ("b",) * k + ("b'",) * l)
    return out


def test_09_rewriting_sanity(report):
    problems = []
    for name in sorted(PRESETS):
        P = preset(name, BASE)
        if check_local_confluence(P, 4):
            problems.append(("confluence", name))
        rng = random.Random(SEED)
        for _ in range(500):
            x = random_poly(rng, P, 5, 3)
            nx = P.normal_form(x)
            if P.normal_form(nx) != nx or P.normal_form(x.star()) != P.normal_form(nx.star()):
                problems.append(("nf", name, str(x)))
                break
    M, H = mirror_sphere(BASE), heegaard_sphere(BASE)
    pool = _degree_zero_canonical(24)
    sample = random.Random(SEED).sample(pool, 200)
    for w in sample:
        x = H.word(w)
        if not H.equals(lift(descend(x, H, M), H), x):
            problems.append(("round-trip", w))
    report(not problems, f"problems={problems[:3]} ({len(sample)} monomials from a pool of {len(pool)})")


def test_10_theta_independence(report):
    values = {}
    for theta in ("0", "1/4", "1/3"):
        values[theta] = tuple(_cli_exact_pairing(mu, theta) for mu in range(-4, 5))
    ok = len(set(values.values())) == 1 and all(code == 0 for code, _ in values["0"])
    shown = [v for _, v in values["0"]]
    report(ok, f"pairings {shown} agree across theta in (0, 1/4, 1/3): {ok}")
