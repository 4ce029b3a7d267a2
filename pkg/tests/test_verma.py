import random
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radialkzb import linalg
from radialkzb.envalg import lie_algebra
from radialkzb.rootdata import WeightVec
from radialkzb.verma import DepthError, VermaModule, irrep, weyl_dimension


def _lam_c_to_root(c):
    # sl2: lambda(H) = c  <->  lambda = (c/2) alpha
    return (Fraction(c) / 2,)


def test_weight_basis_sizes(sl2, sl3):
    V = VermaModule(sl2, _lam_c_to_root(Fraction(3, 5)), 4)
    assert V.weight_basis((-3,)) == [(sl2.e((-1,)),) * 3]
    assert V.dim((0,)) == 1
    W = VermaModule(sl3, (Fraction(1, 3), Fraction(2, 7)), 3)
    assert W.dim((-1, -1)) == 2
    assert W.dim((-2, -1)) == 2
    assert VermaModule(sl3, (Fraction(1, 3), Fraction(2, 7)), 4).dim((-2, -2)) == 3
    with pytest.raises(DepthError):
        W.weight_basis((-2, -2))


def _u_basis_vector(V, n):
    """u_n = F^n m / n! with F = 2 f_alpha."""
    f = V.g.e((-1,))
    vec = V.basis_vector((-n,), (f,) * n)
    return {k: v * Fraction(2**n, factorial(n)) for k, v in vec.items()}


def test_sl2_action_in_classical_basis(sl2):
    lam_c = Fraction(3, 5)
    V = VermaModule(sl2, _lam_c_to_root(lam_c), 6)
    H = sl2.H(0) * 4
    F = sl2.E((-1,)) * 2
    for n in range(5):
        u = _u_basis_vector(V, n)
        hu = V.act(H, u)
        assert (hu[(-n,)] == u[(-n,)] * (lam_c - 2 * n)).all()
        fu = V.act(F, u)
        nxt = _u_basis_vector(V, n + 1)
        assert (fu[(-n - 1,)] == nxt[(-n - 1,)] * (n + 1)).all()
    eu1 = V.act(sl2.E((1,)), _u_basis_vector(V, 1))
    assert eu1[(0,)][0] == lam_c / 2


def test_shapovalov_examples(sl2):
    lam_c = Fraction(3, 5)
    V = VermaModule(sl2, _lam_c_to_root(lam_c), 3)
    assert V.shapovalov_gram((0,))[0, 0] == 1
    assert V.shapovalov_gram((-1,))[0, 0] == lam_c / 4
    Z = VermaModule(sl2, (Fraction(0),), 2)
    assert Z.shapovalov_gram((-1,))[0, 0] == 0


@pytest.mark.parametrize(
    "ct,mu,dim",
    [("A1", (1,), 2), ("A1", (2,), 3), ("A1", (4,), 5), ("A2", (1, 0), 3), ("A2", (0, 1), 3), ("A2", (1, 1), 8), ("A1", (0,), 1)],
)
def test_irrep_dimensions(ct, mu, dim):
    g = lie_algebra(ct)
    U = irrep(g, WeightVec(tuple(Fraction(c) for c in mu), "fund"))
    assert U.dim == dim == weyl_dimension(g.rs, WeightVec(tuple(Fraction(c) for c in mu), "fund"))
    assert U.check_brackets()


def test_irrep_weyl_symmetry(sl3):
    U = irrep(sl3, WeightVec((Fraction(1), Fraction(1)), "fund"))
    rs = sl3.rs
    for w in U.weight_set:
        for i in range(rs.rank):
            s = rs.simple_reflection(i, w).coords
            assert len(U.weight_indices(w)) == len(U.weight_indices(s))
    assert len(U.weight_indices((0, 0))) == 2


def test_dual_module_brackets(sl3):
    U = irrep(sl3, WeightVec((Fraction(1), Fraction(0)), "fund"))
    assert U.dual().check_brackets()


def test_rejects_non_dominant(sl2):
    with pytest.raises(ValueError):
        irrep(sl2, (Fraction(-1, 2),))


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_contravariance_of_shapovalov(seed):
    g = lie_algebra("A2")
    rng = random.Random(seed)
    lam = (Fraction(rng.randint(-9, 9), rng.randint(1, 7)), Fraction(rng.randint(-9, 9), rng.randint(1, 7)))
    V = VermaModule(g, lam, 3)
    # B(x u, v) = -B(u, theta(x) v) for x = E[-b], u in M[gamma], v in M[gamma - b]
    for b in g.rs.positive_roots:
        neg = tuple(-c for c in b)
        fi, ei = g.e(neg), g.e(b)
        for gm in V.weights:
            low = tuple(x - y for x, y in zip(gm, b))
            if -sum(low) > V.m or V.dim(gm) == 0:
                continue
            for bu in V.weight_basis(gm):
                for bv in V.weight_basis(low):
                    xu = V.apply_gen(fi, V.basis_vector(gm, bu))[low]
                    lhs = sum(a * c for a, c in zip(xu, V.shapovalov_gram(low) @ V.basis_vector(low, bv)[low]))
                    tv = V.apply_gen(ei, V.basis_vector(low, bv))[gm]
                    rhs = sum(a * c for a, c in zip(V.basis_vector(gm, bu)[gm], V.shapovalov_gram(gm) @ tv))
                    assert lhs == rhs


@given(st.fractions(min_value=-4, max_value=4, max_denominator=9), st.fractions(min_value=-4, max_value=4, max_denominator=9))
@settings(max_examples=25, deadline=None)
def test_generic_weight_gives_nonsingular_shapovalov(x, y):
    g = lie_algebra("A2")
    lam = (x, y)
    m = 3
    if not g.rs.is_hc_generic(lam, m):
        return
    V = VermaModule(g, lam, m)
    for gm in V.weights:
        if V.dim(gm) and any(gm):
            G = V.shapovalov_gram(gm)
            assert linalg.rank(G) == G.shape[0]
