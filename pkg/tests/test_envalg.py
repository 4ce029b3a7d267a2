import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radialkzb.envalg import TensorElement, UEAElement, commutator, lie_algebra, pbw_normalize

HALF = Fraction(1, 2)


def _mat(rows):
    return np.array([[Fraction(x) for x in r] for r in rows], dtype=object)


def test_sl2_root_vectors_match_classical_normalization(sl2):
    e = sl2.matrices[sl2.e((1,))]
    f = sl2.matrices[sl2.e((-1,))]
    h = sl2.matrices[sl2.h(0)]
    assert (e == _mat([[0, HALF], [0, 0]])).all()
    assert (f == _mat([[0, 0], [HALF, 0]])).all()
    # t_alpha = H/4
    assert (h == _mat([[Fraction(1, 4), 0], [0, Fraction(-1, 4)]])).all()
    assert sl2.n_of((1,)) == 1
    # [t_alpha, e_alpha] = (alpha, alpha) e_alpha
    assert sl2.lie_bracket(sl2.h(0), sl2.e((1,))) == {sl2.e((1,)): HALF}


def test_pbw_straightening_examples(sl2):
    e, f, h = sl2.E((1,)), sl2.E((-1,)), sl2.H(0)
    assert e * f == f * e + h
    assert e * f * f == f * f * e + f * h * 2 - f * HALF
    assert h * e == e * h + e * HALF
    word = pbw_normalize(sl2, [sl2.e((1,)), sl2.e((-1,)), sl2.e((-1,))])
    assert word == e * f * f


def test_sl2_casimir_closed_form(sl2):
    # Omega = H^2/8 + (EF+FE)/4 with H = 4h, E = 2e, F = 2f
    e, f, h = sl2.E((1,)), sl2.E((-1,)), sl2.H(0)
    assert sl2.casimir() == h * h * 2 + e * f + f * e


@pytest.mark.parametrize("ct", ["A1", "A2", "B2"])
def test_casimir_central_and_second_form(ct):
    g = lie_algebra(ct)
    om = g.casimir()
    assert om == g.casimir_second_form()
    for i in range(g.dim):
        assert commutator(om, UEAElement.gen(g.U, i)).is_zero()


def _br(g, x: dict, y: dict) -> dict:
    out: dict = {}
    for i, a in x.items():
        for j, b in y.items():
            for k, c in g.lie_bracket(i, j).items():
                out[k] = out.get(k, 0) + a * b * c
    return {k: v for k, v in out.items() if v}


def _add(*ds) -> dict:
    out: dict = {}
    for d in ds:
        for k, v in d.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("ct", ["A1", "A2", "B2"])
def test_jacobi_exhaustive(ct):
    g = lie_algebra(ct)
    n = g.dim
    unit = lambda i: {i: Fraction(1)}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = _add(
                    _br(g, unit(i), _br(g, unit(j), unit(k))),
                    _br(g, unit(j), _br(g, unit(k), unit(i))),
                    _br(g, unit(k), _br(g, unit(i), unit(j))),
                )
                assert not s


@pytest.mark.parametrize("ct", ["A1", "A2", "B2"])
def test_theta_is_involutive_automorphism(ct):
    g = lie_algebra(ct)

    def th(d):
        out = {}
        for i, c in d.items():
            j, s = g.theta_index(i)
            out[j] = out.get(j, 0) + s * c
        return out

    for i in range(g.dim):
        assert th(th({i: Fraction(1)})) == {i: Fraction(1)}
        for j in range(g.dim):
            assert th(g.lie_bracket(i, j)) == _br(g, th({i: Fraction(1)}), th({j: Fraction(1)}))


def test_theta_examples(sl3):
    for a in sl3.rs.positive_roots:
        neg = tuple(-c for c in a)
        assert sl3.theta(sl3.E(a)) == -sl3.E(neg)
        assert sl3.theta(sl3.Y(a)) == sl3.Y(a)
    assert sl3.theta(sl3.H(1)) == -sl3.H(1)


def test_antipode(sl3):
    a, b = sl3.rs.positive_roots[0], sl3.rs.positive_roots[1]
    ya, yb = sl3.Yk(a), sl3.Yk(b)
    assert sl3.antipode_k(ya) == -ya
    one = UEAElement.one(sl3.Uk)
    assert sl3.antipode_k(one) == one
    assert sl3.antipode_k(ya * yb) == yb * ya


def test_y_expansion(sl3):
    for a in sl3.rs.positive_roots:
        assert sl3.k_to_g(sl3.Yk(a)) == sl3.Y(a)
        assert sl3.g_to_k(sl3.Y(a)) == sl3.Yk(a)


def test_coproduct(sl2):
    y = sl2.Yk((1,))
    one = UEAElement.one(sl2.Uk)
    assert sl2.coproduct_iter(y, 2) == TensorElement.from_factors([y, one]) + TensorElement.from_factors([one, y])
    three = sl2.coproduct_iter(y, 3)
    want = sum(
        (TensorElement.from_factors([y if k == leg else one for k in range(3)]) for leg in range(3)),
        TensorElement([sl2.Uk] * 3),
    )
    assert three == want
    assert sl2.coproduct_iter(one, 2) == TensorElement.one([sl2.Uk] * 2)


def _random_element(g, rng, max_deg=3):
    out = UEAElement(g.U)
    for _ in range(rng.randint(1, 3)):
        word = [rng.randrange(g.dim) for _ in range(rng.randint(0, max_deg))]
        out = out + UEAElement.from_word(g.U, word) * Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return out


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_associativity(seed):
    g = lie_algebra("A2")
    rng = random.Random(seed)
    a, b, c = (_random_element(g, rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_normalization_idempotent_and_theta_multiplicative(seed):
    g = lie_algebra("A2")
    rng = random.Random(seed)
    a, b = _random_element(g, rng), _random_element(g, rng)
    assert all(c != 0 for c in a.terms.values())
    assert a * UEAElement.one(g.U) == a
    assert g.theta(a * b) == g.theta(a) * g.theta(b)
