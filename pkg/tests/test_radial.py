import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radialkzb import fseries, hcm
from radialkzb.envalg import UEAElement, lie_algebra
from radialkzb.fseries import SeriesDiffOp
from radialkzb.intertwine import KModule
from radialkzb.radial import (
    TorusPoint,
    hamiltonian,
    hamiltonian_closed_form,
    pi_hat_casimir,
    pi_hat_casimir_rewritten,
    radial_casimir,
    radial_component,
    random_pbw_monomial,
    spinless_potential,
    verify_gamma,
)
from radialkzb.rfunc import RFunc, coth, inv_one_minus, inv_sinh, inv_sinh2
from radialkzb.scalars import I


def _one(c):
    a = np.empty((1, 1), dtype=object)
    a[0, 0] = c
    return a


def test_simple_radial_components(sl2):
    rs = sl2.rs
    assert radial_component(sl2.H(0)).terms == {((), (0,), ()): RFunc.const(rs, 1)}
    assert radial_component(sl2.Y((1,))).terms == {((), (), (0,)): RFunc.const(rs, 1)}
    pe = radial_component(sl2.E((1,)))
    # (xi_-a - xi_a)^{-1} (x) 1 (x) y (x) 1  -  (xi_-2a - 1)^{-1} (x) 1 (x) 1 (x) y
    assert pe.coefficient(((0,), (), ())) == -inv_sinh(rs, (1,))
    assert pe.coefficient(((), (), (0,))) == inv_one_minus(rs, (1,))
    assert len(pe.terms) == 2


@pytest.mark.parametrize("ct", ["A1", "A2", "B2"])
def test_gamma_oracle_on_generators(ct):
    g = lie_algebra(ct)
    a = TorusPoint(g.rs, tuple(Fraction(1, 2 + i) for i in range(g.rank)))
    for i in range(g.dim):
        assert verify_gamma(UEAElement.gen(g.U, i), a)
    assert verify_gamma(g.casimir(), a)


def test_gamma_oracle_casimir_half(sl2):
    assert verify_gamma(sl2.casimir(), TorusPoint(sl2.rs, (Fraction(1, 2),)))


@given(st.integers(0, 10**6), st.sampled_from(["A1", "A2"]))
@settings(max_examples=30, deadline=None)
def test_gamma_oracle_random(seed, ct):
    g = lie_algebra(ct)
    rng = random.Random(seed)
    x = random_pbw_monomial(g, rng, 4)
    assert verify_gamma(x, TorusPoint.random(g.rs, rng))


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_linearity_and_filtration(seed):
    g = lie_algebra("A2")
    rng = random.Random(seed)
    x, y = random_pbw_monomial(g, rng, 3), random_pbw_monomial(g, rng, 3)
    c = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
    assert radial_component(x + y * c) == radial_component(x) + radial_component(y).scale(c)
    assert all(d <= x.degree() for d in radial_component(x).degrees())


@pytest.mark.parametrize("ct", ["A1", "A2"])
def test_casimir_closed_form(ct):
    g = lie_algebra(ct)
    closed = radial_casimir(g)
    rew = radial_component(g.casimir())
    assert closed == rew
    assert closed.expand(12) == rew.expand(12)


def test_casimir_height_zero_matches_second_form(sl3):
    got = radial_casimir(sl3).expand(0)[(0, 0)]
    want = {}
    base = sl3.npos
    for mono, c in sl3.casimir_second_form().terms.items():
        if all(base <= i < base + sl3.rank for i in mono):
            want[((), tuple(i - base for i in mono), ())] = c
    assert got == want


def test_sl2_casimir_mixed_coefficient(sl2):
    rs = sl2.rs
    f = radial_casimir(sl2).coefficient(((0,), (), (0,)))
    # +alpha and -alpha each contribute -(xi_a + xi_-a)/(xi_a - xi_-a)^2
    assert f == -(coth(rs, (1,)) * inv_sinh(rs, (1,)) * RFunc.const(rs, 2))


def test_rank_one_character_operator(sl2):
    rs = sl2.rs
    nl, nr = I * Fraction(1, 3), I * Fraction(1, 5)
    sigma = (KModule.character(sl2, nl), KModule.character(sl2, -nr))
    m = 10
    op = pi_hat_casimir(sl2, m, sigma)
    # (1/8)(a d/da)^2 + (1/4) coth a d/da + 2 (nl + a^2 nr)(nl + a^-2 nr)/(a^2 - a^-2)^2, a d/da = 4 d_h
    want = SeriesDiffOp.from_parts(
        rs,
        m,
        [
            ((2,), Fraction(2), _one(Fraction(1))),
            ((1,), coth(rs, (1,)), _one(Fraction(1))),
            ((0,), inv_sinh2(rs, (1,)), _one(2 * (nl * nl + nr * nr))),
            ((0,), coth(rs, (1,)) * inv_sinh(rs, (1,)), _one(2 * nl * nr)),
        ],
    )
    assert (op - want).is_zero()


def test_trivial_characters_drop_potential(sl2):
    chi0 = KModule.character(sl2, 0)
    op = pi_hat_casimir(sl2, 8, (chi0, chi0))
    assert set(op.terms) == {(2,), (1,)}


@pytest.mark.parametrize("ct", ["A1", "A2"])
def test_closed_form_matches_rewriter_operator(ct):
    g = lie_algebra(ct)
    m = 6 if ct == "A2" else 10
    assert (pi_hat_casimir(g, m) - pi_hat_casimir_rewritten(g, m)).is_zero()


@pytest.mark.parametrize("ct", ["A1", "A2"])
def test_hamiltonian_two_routes(ct):
    g = lie_algebra(ct)
    m = 6 if ct == "A2" else 10
    assert (hamiltonian(g, m) - hamiltonian_closed_form(g, m)).is_zero()
    if ct == "A1":
        sigma = (KModule.character(g, I * Fraction(2, 3)), KModule.character(g, I * Fraction(-1, 7)))
        assert (hamiltonian(g, m, sigma) - hamiltonian_closed_form(g, m, sigma)).is_zero()


def test_spinless_hamiltonian(sl2):
    rs = sl2.rs
    assert rs.norm2(rs.rho) == Fraction(1, 8)
    chi0 = KModule.character(sl2, 0)
    m = 10
    H = hamiltonian(sl2, m, (chi0, chi0))
    lap = fseries.laplacian(rs, m, _one(Fraction(1))).scale(Fraction(-1, 2))
    pot = spinless_potential(sl2, m)
    want = lap + SeriesDiffOp(rs, m, {(0,): pot.map(_one)})
    assert (H - want).is_zero()
    # -(1/2)(|a|^2/2) (xi_a - xi_-a)^{-2} summed over both roots: first term -1/4 xi_-2a
    assert pot.coeff((-2,)) == Fraction(-1, 4)


def test_radial_casimir_eigen_on_hc_series(sl3):
    from radialkzb.rootdata import WeightVec
    from radialkzb.verma import irrep

    V = KModule.restriction(irrep(sl3, WeightVec((Fraction(1), Fraction(0)), "fund")))
    lam = (Fraction(2, 7), Fraction(-1, 3))
    hc = hcm.hc_coefficients(sl3, lam, 5, (V, V))
    op = pi_hat_casimir(sl3, 5, (V, V))
    s = hc.series()
    res = op.apply(s) - s.scale(hcm.eigenvalue(sl3.rs, lam))
    assert res.is_zero()


def test_torus_point_validation(sl2):
    with pytest.raises(ValueError):
        TorusPoint(sl2.rs, (Fraction(3, 2),))


def test_gamma_oracle_detects_perturbation(sl3):
    from radialkzb.radial import RadialElement

    a = TorusPoint(sl3.rs, (Fraction(1, 3), Fraction(2, 5)))
    x = sl3.E((1, 0)) * sl3.E((0, -1))
    pi = radial_component(x)
    assert pi.evaluate(a) == x
    bad = dict(pi.terms)
    key = ((), (), (0,))
    bad[key] = bad.get(key, RFunc.const(sl3.rs, 0)) + inv_one_minus(sl3.rs, (1, 1))
    assert RadialElement(sl3, bad).evaluate(a) != x
