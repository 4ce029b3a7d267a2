from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radialkzb import rankone
from radialkzb.rankone import GaussSeries, hc_closed_form, mp_poly, pochhammer, poisson_series, verify_poisson
from radialkzb.scalars import I, simplify


def test_low_degree_polynomials():
    lam = Fraction(3, 5)
    assert mp_poly(0, lam).coeffs == (1,)
    assert mp_poly(1, lam).coeffs == (0, 1)
    assert mp_poly(2, lam).coeffs == (-lam / 2, 0, 1)
    # p_3 = s^3 - (3 lam + 1)/2 s
    assert mp_poly(3, lam).coeffs == (0, -(3 * lam + 1) / 2, 0, 1)


@pytest.mark.parametrize("n", range(21))
def test_monic_and_parity(n):
    p = mp_poly(n, Fraction(-1, 4))
    assert len(p.coeffs) == n + 1 and p.coeffs[-1] == 1
    assert all(c == 0 for k, c in enumerate(p.coeffs) if (n - k) % 2)


def test_pochhammer():
    assert pochhammer(Fraction(1, 2), 0) == 1
    assert pochhammer(Fraction(1, 2), 3) == Fraction(1, 2) * Fraction(3, 2) * Fraction(5, 2)
    assert pochhammer(-2, 3) == 0


def test_gauss_series_known_case():
    # 2F1(1, 1; 2 | z) = -log(1 - z)/z
    gs = GaussSeries(Fraction(1), Fraction(1), Fraction(2), 6)
    assert gs.coeffs == [Fraction(1, k + 1) for k in range(7)]
    with pytest.raises(ZeroDivisionError):
        GaussSeries(Fraction(1), Fraction(1), Fraction(-1), 3)


def test_first_coefficient_closed_form():
    lam_c, nl, nr = Fraction(1, 2), I * Fraction(1, 3), I * Fraction(1, 5)
    s = poisson_series(lam_c, nl, nr, 2)
    assert s[0] == 1
    assert s[1] == 4 * nl * nr / lam_c == Fraction(-8, 15)
    assert s[2] == Fraction(-17, 450)


def test_zero_characters():
    # nu_l = nu_r = 0: (1+x)^lam 2F1(-lam/2, -lam/2; -lam | 4x/(1+x)^2)
    lam_c = Fraction(-3, 7)
    s = poisson_series(lam_c, 0, 0, 6)
    assert all(s[n] == 0 for n in range(1, 7, 2))
    assert verify_poisson(lam_c, 0, 0, 6).passed


@pytest.mark.parametrize(
    "lam_c,nl,nr",
    [
        (Fraction(1, 2), I * Fraction(1, 3), I * Fraction(1, 5)),
        (Fraction(-5, 3), I * Fraction(2, 7), I * Fraction(-3, 4)),
        (Fraction(7, 4), Fraction(1, 3), Fraction(0)),
    ],
)
def test_poisson_identity(lam_c, nl, nr):
    rep = verify_poisson(lam_c, nl, nr, 10)
    assert rep.passed, rep.mismatches


@given(
    st.fractions(min_value=-5, max_value=5, max_denominator=9),
    st.fractions(min_value=-2, max_value=2, max_denominator=7),
    st.fractions(min_value=-2, max_value=2, max_denominator=7),
)
@settings(max_examples=40, deadline=None)
def test_poisson_identity_random(lam_c, a, b):
    if lam_c.denominator == 1 and lam_c >= 0:
        return
    assert verify_poisson(lam_c, I * a, I * b, 6).passed


def test_negative_control_pochhammer_sign():
    lam_c, nl, nr = Fraction(1, 2), I * Fraction(1, 3), I * Fraction(1, 5)
    wrong = [
        simplify(Fraction(4) ** n * rankone.mp_value(n, -lam_c / 2, -nl) * rankone.mp_value(n, -lam_c / 2, -nr)
                 / (pochhammer(lam_c, n) * factorial(n)) * (-1) ** n)
        for n in range(6)
    ]
    assert wrong != hc_closed_form(lam_c, nl, nr, 5)


def test_closed_form_rejects_integer_weight():
    with pytest.raises(ValueError):
        hc_closed_form(2, 0, 0, 3)
