from fractions import Fraction

import numpy as np
import pytest

from radialkzb import hcm, linalg, rankone
from radialkzb.hcm import eigenvalue, hc_coefficients, push_universal, verify_mainTHMF, verify_schrodinger
from radialkzb.intertwine import KModule, NonGenericWeight, phi_left, phi_right
from radialkzb.radial import pi_hat_casimir
from radialkzb.rootdata import WeightVec
from radialkzb.scalars import I
from radialkzb.verma import irrep


def _chars(g, nl, nr):
    return (KModule.character(g, nl), KModule.character(g, -nr))


def test_leading_and_first_coefficient(sl2):
    nl, nr = I * Fraction(1, 3), I * Fraction(1, 5)
    hc = hc_coefficients(sl2, (Fraction(1, 4),), 4, _chars(sl2, nl, nr))
    assert hc.coeff((0,))[0, 0] == 1
    assert hc.coeff((-1,))[0, 0] == Fraction(-8, 15)
    assert hc.mode == "represented"


@pytest.mark.parametrize(
    "lam_c,nl,nr",
    [(Fraction(1, 2), I * Fraction(1, 3), I * Fraction(1, 5)), (Fraction(-7, 3), I * Fraction(3, 2), Fraction(1, 4))],
)
def test_rank_one_recursion_matches_polynomial_series(sl2, lam_c, nl, nr):
    m = 10
    lam = sl2.rs.fund_to_root(WeightVec((lam_c,), "fund")).coords
    hc = hc_coefficients(sl2, lam, m, _chars(sl2, nl, nr))
    want = rankone.poisson_series(lam_c, nl, nr, m)
    for n in range(m + 1):
        c = hc.coeff((-n,))
        assert (c[0, 0] if c is not None else 0) == want[n]


def test_nongeneric_weight(sl2):
    with pytest.raises(NonGenericWeight):
        hc_coefficients(sl2, (Fraction(0),), 4)
    with pytest.raises(NonGenericWeight):
        hc_coefficients(sl2, (Fraction(1),), 6)


def test_universal_pushes_to_represented(sl2):
    lam = (Fraction(2, 7),)
    m = 6
    uni = hc_coefficients(sl2, lam, m)
    assert uni.mode == "universal"
    V = KModule.restriction(irrep(sl2, (Fraction(1, 2),)))
    for sigma in (_chars(sl2, I * Fraction(1, 3), Fraction(2, 5)), (V, V)):
        rep = hc_coefficients(sl2, lam, m, sigma)
        pushed = push_universal(uni, sigma)
        for gm in sl2.rs.qminus(m):
            a = rep.coeff(gm)
            b = pushed.get(gm)
            a = linalg.zeros(b.shape) if a is None and b is not None else a
            if b is None:
                assert a is None or linalg.is_zero_array(a)
            else:
                assert linalg.is_zero_array(a - b)


def test_universal_leading_term_is_unit(sl3):
    uni = hc_coefficients(sl3, (Fraction(1, 5), Fraction(-2, 9)), 2)
    lead = uni.coeff((0, 0))
    assert lead.terms == {((), ()): Fraction(1)}


def test_perturbed_series_fails_eigen_equation(sl2):
    sigma = _chars(sl2, I * Fraction(1, 3), I * Fraction(1, 5))
    lam = (Fraction(1, 4),)
    hc = hc_coefficients(sl2, lam, 6, sigma)
    op = pi_hat_casimir(sl2, 6, sigma)
    zeta = eigenvalue(sl2.rs, lam)
    s = hc.series()
    assert (op.apply(s) - s.scale(zeta)).is_zero()
    bad = dict(hc.coeffs)
    bad[(-2,)] = bad[(-2,)] + bad[(0,)] * Fraction(1, 100)
    s2 = hcm.HCSeries(sl2, lam, "represented", 6, bad, sigma).series()
    assert not (op.apply(s2) - s2.scale(zeta)).is_zero()


def test_formal_spherical_equals_hc_rank_one(sl2):
    sigma = _chars(sl2, I * Fraction(1, 3), I * Fraction(1, 5))
    rep = verify_mainTHMF(sl2, (Fraction(1, 4),), sigma, [1], [1], 10)
    assert rep.passed, rep.details


def test_formal_spherical_bilinear_in_v_and_f(sl2):
    V = KModule.restriction(irrep(sl2, (Fraction(1, 2),)))
    lam = (Fraction(3, 7),)
    m = 6

    def F(v, f):
        return hcm.formal_spherical(phi_left(sl2, lam, V, v, m), phi_right(sl2, lam, V, f, m)).series

    a = F([1, 0], [2, 1])
    b = F([0, 1], [2, 1])
    assert (F([3, -2], [2, 1]) - (a.scale(3) + b.scale(-2))).is_zero()
    assert F([0, 0], [2, 1]).is_zero()
    lead = a.coeff((0,), None)
    assert list(lead) == list(np.kron([1, 0], [2, 1]))


def test_main_identity_sl3():
    from radialkzb.envalg import lie_algebra

    g = lie_algebra("A2")
    V = KModule.restriction(irrep(g, WeightVec((1, 0), "fund")))
    rep = verify_mainTHMF(g, (Fraction(3, 7), Fraction(-2, 9)), (V, V), [1, 2, -1], [2, 0, 1], 4)
    assert rep.passed, rep.details


def test_schrodinger_rank_one(sl2):
    sigma = _chars(sl2, I * Fraction(1, 3), I * Fraction(1, 5))
    lam = (Fraction(1, 4) + sl2.rs.rho.coords[0],)
    rep = verify_schrodinger(sl2, lam, sigma, [1], [1], 8)
    assert rep.passed, rep.details


def test_eigenvalue_formula(sl2):
    # (lam, lam + 2 rho) with (a,a) = 1/2: lam_c (lam_c + 2)/8
    lam_c = Fraction(1, 2)
    assert eigenvalue(sl2.rs, (lam_c / 2,)) == lam_c * (lam_c + 2) / 8
