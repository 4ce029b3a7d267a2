"""Radial components of U(g) relative to the infinitesimal Cartan decomposition.

An element x of U(g) is rewritten as sum f * Ad_{a^{-1}}(A) H K with f in the
ring R of torus functions, A and K monomials in U(k) and H a monomial in U(h).
The rewriting substitutes the relations

    E[a]  = (-xi_{-a} AdY[a] + Y[a]) / (1 - xi_{-2a})
    E[-a] = (-xi_{-a} AdY[a] + xi_{-2a} Y[a]) / (1 - xi_{-2a})

(a > 0, AdY[a] = Ad_{a^{-1}} Y[a]) and normal-orders letters into A | H | K
blocks with exact commutators whose coefficients stay in R.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import fseries, linalg
from .envalg import SplitLieAlgebra, TensorElement, UEAElement, _add_into, lie_algebra
from .fseries import FormalSeries, SeriesDiffOp
from .intertwine import KModule
from .rfunc import RFunc, coth, inv_sinh, inv_sinh2, xi
from .rootdata import RootSystem

Key = tuple  # (A mono, H mono, K mono)


@dataclass(frozen=True)
class TorusPoint:
    """Point a of the torus with t_i = a^{-alpha_i} rational in (0, 1)."""

    rs: RootSystem
    t: tuple

    def __post_init__(self):
        if len(self.t) != self.rs.rank:
            raise ValueError("one coordinate per simple root")
        for x in self.t:
            if not 0 < Fraction(x) < 1:
                raise ValueError("torus coordinates must lie in (0, 1)")

    def xi(self, mu) -> Fraction:
        out = Fraction(1)
        for ti, c in zip(self.t, mu):
            out *= Fraction(ti) ** (-int(c))
        return out

    @classmethod
    def random(cls, rs: RootSystem, rng: random.Random) -> "TorusPoint":
        return cls(rs, tuple(Fraction(rng.randint(1, 9), rng.randint(10, 19)) for _ in range(rs.rank)))


class RadialElement:
    """Element of R (x) U(h) (x) U(k) (x) U(k): {(A, H, K): RFunc}."""

    __slots__ = ("g", "terms")

    def __init__(self, g: SplitLieAlgebra, terms: dict | None = None):
        self.g = g
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    def __add__(self, other: "RadialElement") -> "RadialElement":
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return RadialElement(self.g, out)

    def __neg__(self):
        return RadialElement(self.g, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RadialElement":
        return RadialElement(self.g, {k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, RadialElement):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def coefficient(self, key: Key) -> RFunc:
        return self.terms.get(key, RFunc(self.g.rs, {}))

    def degrees(self) -> tuple:
        """Maximal degrees of the A, H and K legs."""
        if not self.terms:
            return (0, 0, 0)
        return tuple(max(len(k[i]) for k in self.terms) for i in range(3))

    def expand(self, m: int) -> dict:
        """{gamma: {key: coeff}} truncated at height m."""
        out: dict = {}
        for key, f in self.terms.items():
            for gm, c in f.expand(m).items():
                out.setdefault(gm, {})[key] = c
        return out

    def evaluate(self, a: TorusPoint) -> UEAElement:
        """Gamma_a: f (x) h (x) y (x) y' -> f(a) Ad_{a^{-1}}(y) h y' in U(g)."""
        g = self.g
        U = g.U
        out = UEAElement(U)
        for (A, H, K), f in self.terms.items():
            val = f.evaluate(a.t)
            if val == 0:
                continue
            term = UEAElement.one(U, val)
            for j in A:
                al = g.k_roots[j]
                neg = tuple(-c for c in al)
                term = term * (g.E(al, a.xi(neg)) - g.E(neg, a.xi(al)))
            for b in H:
                term = term * g.H(b)
            for j in K:
                term = term * g.Y(g.k_roots[j])
            out = out + term
        return out

    def __repr__(self):
        g = self.g
        parts = []
        for (A, H, K), f in sorted(self.terms.items()):
            parts.append(f"{f} (x) {g.Uh.mono_str(H)} (x) {g.Uk.mono_str(A)} (x) {g.Uk.mono_str(K)}")
        return "\n".join(parts) if parts else "0"


class _Rewriter:
    """Memoized right multiplication of normal-ordered terms by letters."""

    def __init__(self, g: SplitLieAlgebra):
        self.g = g
        self.rs = g.rs
        self.one = RFunc.const(self.rs, Fraction(1))
        self._letter_memo: dict = {}
        self._mono_memo: dict = {(): {((), (), ()): self.one}}
        self._decomp = [self._decompose(i) for i in range(g.dim)]

    def _decompose(self, i: int) -> list:
        g, rs = self.g, self.rs
        a = g.basis_roots[i]
        if a is None:
            return [(("H", i - g.npos), self.one)]
        if a in rs.positive_roots:
            j = g.k_roots.index(a)
            neg = tuple(-c for c in a)
            return [
                (("A", j), RFunc.inv_d(rs, a, 1, neg, Fraction(-1))),
                (("K", j), RFunc.inv_d(rs, a, 1)),
            ]
        b = tuple(-c for c in a)
        j = g.k_roots.index(b)
        return [
            (("A", j), RFunc.inv_d(rs, b, 1, a, Fraction(-1))),
            (("K", j), RFunc.inv_d(rs, b, 1, tuple(2 * c for c in a))),
        ]

    # bracket helpers returning {g index: RFunc}

    def _br_y_h(self, j: int, b: int) -> dict:
        """[Y_j, h_b] = -alpha(h_b) (E[a] + E[-a])."""
        g = self.g
        a = g.k_roots[j]
        s = self.rs.on_h(a)[b]
        if s == 0:
            return {}
        return {g.e(a): self.one * (-s), g.e(tuple(-c for c in a)): self.one * (-s)}

    def _br_h_ad(self, b: int, j: int) -> dict:
        """[h_b, AdY_j] = alpha(h_b) (xi_{-a} E[a] + xi_a E[-a])."""
        g = self.g
        a = g.k_roots[j]
        s = self.rs.on_h(a)[b]
        if s == 0:
            return {}
        neg = tuple(-c for c in a)
        return {g.e(a): xi(self.rs, neg, s), g.e(neg): xi(self.rs, a, s)}

    def _br_y_ad(self, j: int, i: int) -> dict:
        """[Y_j, AdY_i] with AdY_i = xi_{-a} E[a] - xi_a E[-a]."""
        g = self.g
        a = g.k_roots[i]
        neg = tuple(-c for c in a)
        out: dict = {}
        for idx, f in ((g.e(a), xi(self.rs, neg)), (g.e(neg), xi(self.rs, a, Fraction(-1)))):
            for yi, yc in g.y_in_g[j].items():
                for k, c in g.bracket[yi][idx].items():
                    _add_into(out, k, f * (yc * c))
        return out

    # multiplication

    def mul_letter(self, key: Key, letter: tuple) -> dict:
        memo_key = (key, letter)
        hit = self._letter_memo.get(memo_key)
        if hit is not None:
            return hit
        g = self.g
        A, H, K = key
        kind, j = letter
        out: dict = {}
        if kind == "K":
            for k2, c in g.Uk.mono_times_gen(K, j).items():
                out[(A, H, k2)] = self.one * c
        elif kind == "H":
            if not K:
                out[(A, tuple(sorted(H + (j,))), ())] = self.one
            else:
                Kp, last = K[:-1], K[-1]
                out = self.mul_terms(self.mul_letter((A, H, Kp), ("H", j)), ("K", last))
                out = _merge(out, self.mul_gvec((A, H, Kp), self._br_y_h(last, j)))
        else:
            if K:
                Kp, last = K[:-1], K[-1]
                out = self.mul_terms(self.mul_letter((A, H, Kp), ("A", j)), ("K", last))
                out = _merge(out, self.mul_gvec((A, H, Kp), self._br_y_ad(last, j)))
            elif H:
                Hp, b = H[:-1], H[-1]
                out = self.mul_terms(self.mul_letter((A, Hp, ()), ("A", j)), ("H", b))
                out = _merge(out, self.mul_gvec((A, Hp, ()), self._br_h_ad(b, j)))
            else:
                for a2, c in g.Uk.mono_times_gen(A, j).items():
                    out[(a2, (), ())] = self.one * c
        self._letter_memo[memo_key] = out
        return out

    def mul_terms(self, terms: dict, letter: tuple) -> dict:
        out: dict = {}
        for key, f in terms.items():
            for k2, c in self.mul_letter(key, letter).items():
                _add_into(out, k2, f * c)
        return out

    def mul_gvec(self, key: Key, gvec: dict) -> dict:
        out: dict = {}
        for idx, f in gvec.items():
            for letter, lc in self._decomp[idx]:
                for k2, c in self.mul_letter(key, letter).items():
                    _add_into(out, k2, f * lc * c)
        return out

    def mono(self, mono: tuple) -> dict:
        hit = self._mono_memo.get(mono)
        if hit is not None:
            return hit
        prev = self.mono(mono[:-1])
        out: dict = {}
        for key, f in prev.items():
            for letter, lc in self._decomp[mono[-1]]:
                for k2, c in self.mul_letter(key, letter).items():
                    _add_into(out, k2, f * lc * c)
        self._mono_memo[mono] = out
        return out


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        _add_into(out, k, v)
    return out


@lru_cache(maxsize=None)
def _rewriter(cartan_type: str) -> _Rewriter:
    return _Rewriter(lie_algebra(cartan_type))


def radial_component(x: UEAElement, m: int | None = None) -> RadialElement:
    """Pi(x) by the rewriting algorithm; coefficients are kept exact in R.

    ``m`` is accepted for interface symmetry; expansion happens via ``expand``.
    """
    g = _algebra_of(x)
    rw = _rewriter(g.rs.cartan_type)
    out: dict = {}
    for mono, c in x.terms.items():
        for key, f in rw.mono(mono).items():
            _add_into(out, key, f * c)
    return RadialElement(g, out)


def _algebra_of(x: UEAElement) -> SplitLieAlgebra:
    for t in ("A1", "A2", "B2"):
        g = lie_algebra(t)
        if x.alg is g.U:
            return g
    raise ValueError("element does not belong to a supported U(g)")


def verify_gamma(x: UEAElement, a: TorusPoint) -> bool:
    """Gamma_a(Pi(x)) == x exactly."""
    return radial_component(x).evaluate(a) == x


def radial_casimir(g: SplitLieAlgebra) -> RadialElement:
    """Closed form of Pi(Omega) (sums over all roots, hatted root vectors)."""
    rs = g.rs
    one = RFunc.const(rs, Fraction(1))
    out: dict = {}
    gi = rs.gram_inverse
    for a in range(rs.rank):
        for b in range(rs.rank):
            if gi[a][b]:
                _add_into(out, ((), tuple(sorted((a, b))), ()), one * gi[a][b])
    for al in rs.roots:
        pos = al if al in rs.positive_roots else tuple(-c for c in al)
        j = g.k_roots.index(pos)
        n = g.n_of(al)
        # t_alpha = sum_i alpha_i h_i
        for i, c in enumerate(al):
            if c:
                _add_into(out, ((), (i,), ()), coth(rs, al) * Fraction(c, 2))
        s2 = inv_sinh2(rs, al) * (Fraction(1) / n)
        _add_into(out, ((j, j), (), ()), s2)
        _add_into(out, ((), (), (j, j)), s2)
        # (xi_a + xi_-a)/(xi_a - xi_-a)^2 = coth * inv_sinh; Y_{-a} = -Y_a twice gives +
        _add_into(out, ((j,), (), (j,)), coth(rs, al) * inv_sinh(rs, al) * (Fraction(-1) / n))
    return RadialElement(g, out)


# ---------------------------------------------------------------------------
# operators on the torus


class LegAction:
    """Coefficient objects for U(k) (x) U(k): universal tensors or sigma_l (x) sigma_r^*."""

    def __init__(self, g: SplitLieAlgebra, sigma: tuple | None = None):
        self.g = g
        self.sigma = sigma
        if sigma is not None:
            self.Vl, self.Vr = sigma
            self.Vr_dual = self.Vr.dual()
            self.dim = self.Vl.dim * self.Vr.dim

    @property
    def universal(self) -> bool:
        return self.sigma is None

    def identity(self):
        if self.universal:
            return TensorElement.one([self.g.Uk, self.g.Uk])
        return linalg.identity(self.dim)

    def pair(self, left: UEAElement, right: UEAElement):
        """left (x) right, the right factor already in the post-antipode leg."""
        if self.universal:
            return TensorElement.from_factors([left, right])
        return np.kron(self.Vl.rep(left), self.Vr_dual.rep(right))

    def mono_pair(self, lmono, rmono, c=Fraction(1)):
        Uk = self.g.Uk
        return self.pair(UEAElement(Uk, {tuple(lmono): c}), UEAElement(Uk, {tuple(rmono): Fraction(1)}))


def pi_hat(rad: RadialElement, m: int, legs: LegAction) -> SeriesDiffOp:
    """(h-leg as derivatives) (x) id (x) S applied to a radial element."""
    g = rad.g
    rs = g.rs
    Uk = g.Uk
    parts = []
    for (A, H, K), f in rad.terms.items():
        p = [0] * rs.rank
        for b in H:
            p[b] += 1
        right = g.antipode_k(UEAElement(Uk, {K: Fraction(1)}))
        obj = legs.pair(UEAElement(Uk, {A: Fraction(1)}), right)
        parts.append((tuple(p), f, obj))
    return SeriesDiffOp.from_parts(rs, m, parts)


def _t_parts(rs: RootSystem, alpha, f: RFunc, obj) -> list:
    out = []
    for i, c in enumerate(alpha):
        if c:
            p = [0] * rs.rank
            p[i] = 1
            out.append((tuple(p), f * c, obj))
    return out


def _potential_parts(g: SplitLieAlgebra, legs: LegAction, extra=None) -> list:
    """sum_R (xi_a - xi_-a)^{-2} prod_eps (y (x) 1 + xi_{eps a} 1 (x) y), plus extra(alpha) * id."""
    rs = g.rs
    parts = []
    zero = tuple([0] * rs.rank)
    for al in rs.roots:
        pos = al if al in rs.positive_roots else tuple(-c for c in al)
        j = g.k_roots.index(pos)
        n = g.n_of(al)
        inv_n = Fraction(1) / n
        s2 = inv_sinh2(rs, al)
        parts.append((zero, s2, legs.mono_pair((j, j), (), inv_n)))
        parts.append((zero, s2, legs.mono_pair((), (j, j), inv_n)))
        parts.append((zero, coth(rs, al) * inv_sinh(rs, al), legs.mono_pair((j,), (j,), inv_n)))
        if extra is not None:
            parts.append((zero, s2 * extra(al), legs.identity()))
    return parts


def pi_hat_casimir(g: SplitLieAlgebra, m: int, sigma: tuple | None = None) -> SeriesDiffOp:
    """Closed form of Pi-hat(Omega), universal (sigma None) or represented."""
    rs = g.rs
    legs = LegAction(g, sigma)
    unit = legs.identity()
    op = fseries.laplacian(rs, m, unit)
    parts = []
    for al in rs.roots:
        parts += _t_parts(rs, al, coth(rs, al) * Fraction(1, 2), unit)
    parts += _potential_parts(g, legs)
    return op + SeriesDiffOp.from_parts(rs, m, parts)


def pi_hat_casimir_rewritten(g: SplitLieAlgebra, m: int, sigma: tuple | None = None) -> SeriesDiffOp:
    """Pi-hat(Omega) obtained from the generic rewriter."""
    return pi_hat(radial_component(g.casimir()), m, LegAction(g, sigma))


def hamiltonian(g: SplitLieAlgebra, m: int, sigma: tuple | None = None) -> SeriesDiffOp:
    """-1/2 delta o (Pi-hat(Omega) + |rho|^2) o delta^{-1} by explicit conjugation."""
    rs = g.rs
    legs = LegAction(g, sigma)
    base = pi_hat_casimir(g, m, sigma)
    shift = SeriesDiffOp.from_parts(rs, m, [((0,) * rs.rank, rs.norm2(rs.rho), legs.identity())])
    d = fseries.delta_series(rs, m, 1)
    dinv = fseries.delta_series(rs, m, -1)
    return (base + shift).conjugate(d, dinv).scale(Fraction(-1, 2))


def hamiltonian_closed_form(g: SplitLieAlgebra, m: int, sigma: tuple | None = None) -> SeriesDiffOp:
    """-Delta/2 - 1/2 sum_R (xi_a - xi_-a)^{-2} (|a|^2/2 + prod_eps(...))."""
    rs = g.rs
    legs = LegAction(g, sigma)
    lap = fseries.laplacian(rs, m, legs.identity())
    pot = SeriesDiffOp.from_parts(rs, m, _potential_parts(g, legs, lambda al: rs.norm2(al) / 2))
    return (lap + pot).scale(Fraction(-1, 2))


def spinless_potential(g: SplitLieAlgebra, m: int) -> FormalSeries:
    """Scalar potential -1/2 sum_R (|a|^2/2) (xi_a - xi_-a)^{-2}."""
    rs = g.rs
    tot = RFunc(rs, {})
    for al in rs.roots:
        tot = tot + inv_sinh2(rs, al) * (rs.norm2(al) / 2)
    return FormalSeries.from_rfunc(tot, m, Fraction(-1, 2))


def random_pbw_monomial(g: SplitLieAlgebra, rng: random.Random, max_degree: int) -> UEAElement:
    d = rng.randint(1, max_degree)
    word = sorted(rng.randrange(g.dim) for _ in range(d))
    return UEAElement(g.U, {tuple(word): Fraction(1)})
