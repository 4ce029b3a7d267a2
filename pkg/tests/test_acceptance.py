"""The twelve acceptance criteria, one test each, each printing a PASS/FAIL line.

Run directly with ``python tests/test_acceptance.py`` for the summary alone.
"""

import random
import time
from fractions import Fraction

import pytest

from radialkzb import hcm, kzb, linalg, rankone
from radialkzb.envalg import lie_algebra
from radialkzb.intertwine import KModule, is_weight_unitriangular, normalized_boundary_fusion, u_weight_of_index
from radialkzb.radial import TorusPoint, radial_casimir, radial_component, random_pbw_monomial, verify_gamma
from radialkzb.rootdata import WeightVec
from radialkzb.scalars import I
from radialkzb.verma import irrep, weyl_dimension


def _sl2_setup(g):
    U = irrep(g, (1,))
    V = KModule.restriction(irrep(g, (Fraction(1, 2),)))
    zero = next(i for i, w in enumerate(U.weights) if not any(w))
    return U, V, zero


def criterion_1():
    """Radial components agree with the defining identity at sample torus points."""
    t0 = time.perf_counter()
    ok = True
    for ct in ("A1", "A2"):
        g = lie_algebra(ct)
        rng = random.Random(1)
        for _ in range(50):
            x = random_pbw_monomial(g, rng, 4)
            ok &= all(verify_gamma(x, TorusPoint.random(g.rs, rng)) for _ in range(3))
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 60, f"radial oracle, 2x50 monomials x 3 points in {elapsed:.1f}s"


def criterion_2():
    ok = True
    for ct in ("A1", "A2"):
        g = lie_algebra(ct)
        ok &= radial_casimir(g).expand(12) == radial_component(g.casimir()).expand(12)
    return ok, "closed-form radial Casimir equals the rewriter, height 12"


def criterion_3():
    g = lie_algebra("A1")
    lam_c, nl, nr = Fraction(1, 2), I * Fraction(1, 3), I * Fraction(1, 5)
    hc = hcm.hc_coefficients(g, (lam_c / 2,), 10, (KModule.character(g, nl), KModule.character(g, -nr)))
    want = rankone.poisson_series(lam_c, nl, nr, 10)
    ok = all((hc.coeff((-n,))[0, 0] if hc.coeff((-n,)) is not None else 0) == want[n] for n in range(11))
    return ok, "rank-one Harish-Chandra coefficients equal the polynomial closed form, n <= 10"


def criterion_4():
    triples = [
        (Fraction(1, 2), I * Fraction(1, 3), I * Fraction(1, 5)),
        (Fraction(-5, 3), I * Fraction(2, 7), I * Fraction(-3, 4)),
    ]
    ok = all(rankone.verify_poisson(*t, 10).passed for t in triples)
    return ok, "Poisson kernel identity to order 10 for two parameter triples"


def criterion_5():
    g = lie_algebra("A2")
    V = KModule.restriction(irrep(g, WeightVec((1, 0), "fund")))
    rng = random.Random(5)
    while True:
        lam = tuple(Fraction(rng.randint(-9, 9), rng.randint(2, 11)) for _ in range(2))
        if g.rs.is_hc_generic(lam, 6):
            break
    rep = hcm.verify_mainTHMF(g, lam, (V, V), [1, 2, -1], [2, 0, 1], 6)
    ok = rep.passed and rep.details["a"] and rep.details["c"]
    return ok, f"A2 formal spherical function equals Phi(v (x) f), height 6, lambda = {lam[0]}, {lam[1]}"


def criterion_6():
    ok = True
    g = lie_algebra("A1")
    sig = (KModule.character(g, I * Fraction(1, 3)), KModule.character(g, -I * Fraction(1, 5)))
    ok &= hcm.verify_schrodinger(g, (Fraction(1, 4) + g.rs.rho.coords[0],), sig, [1], [1], 6).passed
    g = lie_algebra("A2")
    V = KModule.restriction(irrep(g, WeightVec((1, 0), "fund")))
    lam = tuple(a + r for a, r in zip((Fraction(3, 7), Fraction(-2, 9)), g.rs.rho.coords))
    ok &= hcm.verify_schrodinger(g, lam, (V, V), [1, 2, -1], [2, 0, 1], 6).passed
    return ok, "Schroedinger equation for normalized spherical functions, height 6, A1 and A2"


def criterion_7():
    ok = True
    for ct, m in (("A1", 10), ("A2", 8)):
        g = lie_algebra(ct)
        ok &= all(r.passed for r in kzb.verify_cdybe(g, m))
        ok &= kzb.verify_reflection(g, m).passed
    return ok, "three mixed dynamical Yang-Baxter equations and the reflection equation"


def criterion_8():
    g = lie_algebra("A1")
    U, V, zero = _sl2_setup(g)
    ok = True
    for N in (1, 2):
        data = kzb.NPointData(V, [1, 2], [U] * N, [zero] * N, V, [1, -3])
        ok &= kzb.verify_bkzb_eigen(g, (Fraction(3, 7),), data, 5).passed
    return ok, "boundary KZB eigen-equations, N = 1, 2, height 5"


def criterion_9():
    g = lie_algebra("A1")
    U, V, _ = _sl2_setup(g)
    rep = kzb.verify_commutativity(g, 2, 8, (V, [U, U], V))
    return rep.passed, "boundary KZB operators commute with each other and the Hamiltonian, N = 2, height 8"


def criterion_10():
    g = lie_algebra("A1")
    U, _, zero = _sl2_setup(g)
    lam = (Fraction(3, 7),)
    ok = kzb.verify_relations(g).passed
    ok &= all(kzb.verify_factorization(g, w, lam, U, zero, 6).passed for w in "ab")
    return ok, "factorisations a and b on the adjoint vertex operator, depth 6, plus bridge identities"


def criterion_11():
    g = lie_algebra("A1")
    U, V, _ = _sl2_setup(g)
    M = normalized_boundary_fusion(g, (Fraction(3, 7),), V, [U, U])
    ok = is_weight_unitriangular(M, u_weight_of_index(V, [U, U])) and linalg.det(M) == 1
    return ok, "normalized boundary fusion operator is unitriangular, N = 2"


def criterion_12():
    ok = True
    g = lie_algebra("A1")
    for n in range(6):
        w = WeightVec((n,), "fund")
        M = irrep(g, w)
        ok &= M.dim == n + 1 == weyl_dimension(g.rs, w) and M.check_brackets()
    g = lie_algebra("A2")
    for w, d in (((1, 0), 3), ((1, 1), 8)):
        M = irrep(g, WeightVec(w, "fund"))
        ok &= M.dim == d == weyl_dimension(g.rs, WeightVec(w, "fund")) and M.check_brackets()
    return ok, "irreducible module dimensions match the Weyl formula and brackets hold"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


def _run(k: int):
    ok, label = CRITERIA[k - 1]()
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {k}: {label}"


@pytest.mark.parametrize("k", range(1, 13))
def test_criterion(k, capsys):
    ok, line = _run(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    for k in range(1, 13):
        print(_run(k)[1])
