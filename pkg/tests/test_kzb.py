from fractions import Fraction

import pytest

from radialkzb import hcm, kzb
from radialkzb.envalg import lie_algebra
from radialkzb.intertwine import KModule, phi_left, phi_right
from radialkzb.kzb import NPointData
from radialkzb.verma import irrep

LAM = (Fraction(3, 7),)


@pytest.fixture(scope="module")
def sl2_setup(sl2):
    U = irrep(sl2, (1,))
    V = KModule.restriction(irrep(sl2, (Fraction(1, 2),)))
    zero = next(i for i, w in enumerate(U.weights) if not any(w))
    return U, V, zero


@pytest.mark.parametrize("ct", ["A1", "A2", "B2"])
def test_bridge_identities(ct):
    rep = kzb.verify_relations(lie_algebra(ct))
    assert rep.passed, rep.details


@pytest.mark.parametrize("ct,m", [("A1", 10), ("A2", 6), ("B2", 4)])
def test_cdybe(ct, m):
    g = lie_algebra(ct)
    reps = kzb.verify_cdybe(g, m)
    assert len(reps) == 3
    assert all(r.passed for r in reps), [r.residual_support for r in reps]


def test_cdybe_control_fails(sl3):
    (rep,) = kzb.verify_cdybe(sl3, 4, control=True)
    assert not rep.passed and rep.residual_support


@pytest.mark.parametrize("ct,m", [("A1", 10), ("A2", 6), ("B2", 4)])
def test_reflection(ct, m):
    g = lie_algebra(ct)
    assert kzb.verify_reflection(g, m).passed
    assert kzb.verify_reflection(g, m, kzb.kappa_alternative(g)).passed


def test_reflection_control_fails(sl2):
    rep = kzb.verify_reflection(sl2, 6, kzb.kappa(sl2).scale(2))
    assert not rep.passed and rep.residual_support


def test_classical_limit_of_r(sl2):
    # at a -> infinity r tends to sum_{a>0} e_a (x) e_-a / n_a plus the Cartan half
    lim = kzb.classical_limit(kzb.felder_r(sl2))
    assert not lim.is_zero()


@pytest.mark.parametrize("which", ["a", "b"])
def test_factorizations(sl2, sl2_setup, which):
    U, _, zero = sl2_setup
    rep = kzb.verify_factorization(sl2, which, LAM, U, zero, 6)
    assert rep.passed, rep.residual_support


def test_factorization_without_d_fails(sl2, sl2_setup):
    U, _, zero = sl2_setup
    assert not kzb.verify_factorization(sl2, "a", LAM, U, zero, 4, drop_d=True).passed


def test_factorization_rejects_unknown(sl2):
    with pytest.raises(ValueError):
        kzb.factorization_triple(sl2, "c")


def test_factorization_sl3():
    g = lie_algebra("A2")
    from radialkzb.rootdata import WeightVec

    U = irrep(g, WeightVec((1, 1), "fund"))
    zero = next(i for i, w in enumerate(U.weights) if not any(w))
    lam = (Fraction(3, 7), Fraction(-2, 9))
    assert kzb.verify_factorization(g, "a", lam, U, zero, 3).passed
    assert kzb.verify_factorization(g, "b", lam, U, zero, 3).passed


def test_twisted_commutation(sl2, sl2_setup):
    U, _, zero = sl2_setup
    assert kzb.verify_twisted_commutation(sl2, LAM, U, zero, 6).passed


def _data(sl2_setup, N):
    U, V, zero = sl2_setup
    return NPointData(V, [1, 2], [U] * N, [zero] * N, V, [1, -3])


@pytest.mark.parametrize("N,m", [(1, 6), (2, 5)])
def test_bkzb_eigen(sl2, sl2_setup, N, m):
    rep = kzb.verify_bkzb_eigen(sl2, LAM, _data(sl2_setup, N), m)
    assert rep.passed, rep.details


def test_bkzb_eigen_nonzero_weight_vector(sl2, sl2_setup):
    U, V, _ = sl2_setup
    data = NPointData(V, [1, 0], [U], [0], V, [0, 1])
    assert kzb.verify_bkzb_eigen(sl2, LAM, data, 5).passed


def test_weight_chain(sl2, sl2_setup):
    U, V, _ = sl2_setup
    data = NPointData(V, [1, 0], [U, U], [0, 1], V, [0, 1])
    chain = kzb.weight_chain(sl2, LAM, data)
    assert chain[-1] == LAM
    assert chain[1] == tuple(a - b for a, b in zip(LAM, U.weights[1]))
    assert chain[0] == tuple(a - b for a, b in zip(chain[1], U.weights[0]))


def test_leading_coefficient(sl2, sl2_setup):
    data = _data(sl2_setup, 2)
    F = kzb.npoint_spherical(sl2, LAM, data, 3).series
    assert list(F.coeff((0,), None)) == list(kzb.leading_coefficient(sl2, LAM, data))
    # delta starts with 1, so the normalized function leads with J_l at lam - rho
    shifted = tuple(a - r for a, r in zip(LAM, sl2.rs.rho.coords))
    G = kzb.normalized_npoint(sl2, LAM, data, 3)
    assert list(G.coeff((0,), None)) == list(kzb.leading_coefficient(sl2, shifted, data))


def test_zero_points_is_formal_spherical(sl2, sl2_setup):
    _, V, _ = sl2_setup
    data = NPointData(V, [1, 2], [], [], V, [1, -3])
    m = 6
    got = kzb.npoint_spherical(sl2, LAM, data, m).series
    want = hcm.formal_spherical(phi_left(sl2, LAM, V, [1, 2], m), phi_right(sl2, LAM, V, [1, -3], m)).series
    assert (got - want).is_zero()


def test_height_stability(sl2, sl2_setup):
    data = _data(sl2_setup, 1)
    lo = kzb.normalized_npoint(sl2, LAM, data, 4)
    hi = kzb.normalized_npoint(sl2, LAM, data, 6)
    assert (hi.truncate(4) - lo).is_zero()


def test_commutativity_universal(sl2):
    assert kzb.verify_commutativity(sl2, 2, 4).passed


def test_commutativity_control(sl2, sl2_setup):
    U, V, _ = sl2_setup
    legs = kzb.LegRealization(sl2, 2, (V, [U, U], V))
    D1 = kzb.bkzb_operator(sl2, 1, 2, 4, legs, kap=kzb.kappa(sl2).scale(2))
    D2 = kzb.bkzb_operator(sl2, 2, 2, 4, legs)
    from radialkzb.fseries import commutator

    assert not commutator(D1, D2).is_zero()


def test_vertex_index_range(sl2):
    with pytest.raises(ValueError):
        kzb.bkzb_operator(sl2, 3, 2, 2)
