"""Depth-truncated Verma modules, Shapovalov forms and finite-dimensional irreducibles."""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

from . import linalg
from .envalg import SplitLieAlgebra, UEAElement
from .rootdata import WeightVec


class DepthError(ValueError):
    """A computation needed weights below the truncation depth."""


def _lead(g: SplitLieAlgebra, lam) -> tuple:
    if isinstance(lam, WeightVec):
        lam = g.rs.fund_to_root(lam).coords
    return tuple(Fraction(c) for c in lam)


def f_monomials(g: SplitLieAlgebra, m: int) -> dict:
    """{gamma: [PBW monomials in negative root vectors of weight gamma]} for ht <= m."""
    negs = list(range(g.npos))
    hts = {i: -sum(g.weight_of(i)) for i in negs}
    out: dict = {}

    def rec(mono, start, wt, ht):
        out.setdefault(wt, []).append(mono)
        for i in range(start, len(negs)):
            j = negs[i]
            if ht + hts[j] <= m:
                rec(mono + (j,), i, tuple(a + b for a, b in zip(wt, g.weight_of(j))), ht + hts[j])

    rec((), 0, (0,) * g.rank, 0)
    for k in out:
        out[k].sort()
    return out


ModVec = dict  # gamma -> 1-d (or 2-d with extra columns) object array


class VermaModule:
    """M_lam truncated at depth m; basis of weight lam+gamma: f-monomials applied to m_lam."""

    def __init__(self, g: SplitLieAlgebra, lam, m: int):
        self.g = g
        self.rs = g.rs
        self.lam = _lead(g, lam)
        self.m = m
        self.lam_h = self.rs.on_h(self.lam)
        mon = f_monomials(g, m)
        self.weights = [gm for gm in self.rs.qminus(m)]
        self.basis = {gm: mon.get(gm, []) for gm in self.weights}
        self.index = {gm: {b: i for i, b in enumerate(bs)} for gm, bs in self.basis.items()}
        self._gen: dict = {}

    def dim(self, gamma) -> int:
        return len(self.basis.get(tuple(gamma), []))

    def weight_basis(self, gamma) -> list:
        gamma = tuple(gamma)
        if -sum(gamma) > self.m:
            raise DepthError(f"weight offset {gamma} exceeds depth {self.m}")
        return list(self.basis.get(gamma, []))

    def _eval_on_hw(self, terms: dict) -> dict:
        """U(g) normal form applied to m_lam: {f-monomial: coeff}."""
        out: dict = {}
        for mono, c in terms.items():
            val = c
            fpart = []
            for i in mono:
                if self.g.is_negative(i):
                    fpart.append(i)
                elif self.g.is_positive(i):
                    val = 0
                    break
                else:
                    val = val * self.lam_h[i - self.g.npos]
            if val == 0:
                continue
            k = tuple(fpart)
            out[k] = out.get(k, 0) + val
        return {k: v for k, v in out.items() if v != 0}

    def gen_matrix(self, i: int, gamma) -> np.ndarray:
        """Matrix of basis symbol i from M[gamma] to M[gamma + wt(i)]."""
        gamma = tuple(gamma)
        key = (i, gamma)
        hit = self._gen.get(key)
        if hit is not None:
            return hit
        tgt = tuple(a + b for a, b in zip(gamma, self.g.weight_of(i)))
        src = self.basis.get(gamma, [])
        if any(x > 0 for x in tgt):
            mat = linalg.zeros((0, len(src)))
            self._gen[key] = mat
            return mat
        if -sum(tgt) > self.m:
            raise DepthError(f"action of {self.g.names[i]} leaves depth {self.m}")
        tb = self.index[tgt]
        mat = linalg.zeros((len(tb), len(src)))
        for col, b in enumerate(src):
            res = self._eval_on_hw(self.g.U.mono_mul((i,), b))
            for mono, c in res.items():
                mat[tb[mono], col] = c
        self._gen[key] = mat
        return mat

    def target(self, i: int, gamma) -> tuple:
        return tuple(a + b for a, b in zip(gamma, self.g.weight_of(i)))

    # vectors

    def hw_vector(self) -> ModVec:
        z = (0,) * self.rs.rank
        v = linalg.zeros(1)
        v[0] = Fraction(1)
        return {z: v}

    def apply_gen(self, i: int, vec: ModVec) -> ModVec:
        out: ModVec = {}
        for gm, v in vec.items():
            tgt = self.target(i, gm)
            if any(x > 0 for x in tgt):
                continue
            if linalg.is_zero_array(v):
                continue
            mat = self.gen_matrix(i, gm)
            w = mat @ v
            if tgt in out:
                out[tgt] = out[tgt] + w
            else:
                out[tgt] = w
        return out

    def apply_mono(self, mono: Iterable[int], vec: ModVec) -> ModVec:
        for i in reversed(tuple(mono)):
            vec = self.apply_gen(i, vec)
        return vec

    def act(self, x: UEAElement, vec: ModVec) -> ModVec:
        out: ModVec = {}
        for mono, c in x.terms.items():
            w = self.apply_mono(mono, vec)
            for gm, v in w.items():
                out[gm] = out[gm] + v * c if gm in out else v * c
        return out

    def basis_vector(self, gamma, mono) -> ModVec:
        gamma = tuple(gamma)
        v = linalg.zeros(self.dim(gamma))
        v[self.index[gamma][tuple(mono)]] = Fraction(1)
        return {gamma: v}

    # Shapovalov form

    def _raise_partner(self, i: int) -> int:
        return self.g.e(tuple(-c for c in self.g.weight_of(i)))

    def shapovalov_gram(self, gamma) -> np.ndarray:
        """B(b_i, b_j) with B(x u, v) = -B(u, theta(x) v), B(m, m) = 1."""
        gamma = tuple(gamma)
        bs = self.weight_basis(gamma)
        n = len(bs)
        gram = linalg.zeros((n, n))
        z = (0,) * self.rs.rank
        for j, bj in enumerate(bs):
            vj = self.basis_vector(gamma, bj)
            for i, bi in enumerate(bs):
                v = vj
                # theta(E[-b]) = -E[b], so B(E[-b] u, v) = B(u, E[b] v)
                for f in bi:
                    v = self.apply_gen(self._raise_partner(f), v)
                gram[i, j] = v[z][0] if z in v else Fraction(0)
        return gram


class FinDimModule:
    """Finite-dimensional g-module given by exact matrices on a weight basis."""

    def __init__(self, g: SplitLieAlgebra, mats: list, weights: list, highest=None):
        self.g = g
        self.mats = mats
        self.weights = [tuple(w) for w in weights]
        self.dim = len(weights)
        self.highest = highest

    def rep_mono(self, mono) -> np.ndarray:
        out = linalg.identity(self.dim)
        for i in mono:
            out = out @ self.mats[i]
        return out

    def rep(self, x: UEAElement) -> np.ndarray:
        out = linalg.zeros((self.dim, self.dim))
        for mono, c in x.terms.items():
            out = out + self.rep_mono(mono) * c
        return out

    def weight_indices(self, wt) -> list:
        wt = tuple(Fraction(c) for c in wt)
        return [i for i, w in enumerate(self.weights) if w == wt]

    @cached_property
    def weight_set(self) -> list:
        seen = []
        for w in self.weights:
            if w not in seen:
                seen.append(w)
        return seen

    def check_brackets(self) -> bool:
        g = self.g
        for i in range(g.dim):
            for j in range(g.dim):
                lhs = self.mats[i] @ self.mats[j] - self.mats[j] @ self.mats[i]
                rhs = linalg.zeros((self.dim, self.dim))
                for k, c in g.bracket[i][j].items():
                    rhs = rhs + self.mats[k] * c
                if not linalg.is_zero_array(lhs - rhs):
                    return False
        return True

    def dual(self) -> "FinDimModule":
        mats = [-m.T for m in self.mats]
        return FinDimModule(self.g, mats, [tuple(-c for c in w) for w in self.weights])


def trivial_module(g: SplitLieAlgebra) -> FinDimModule:
    return FinDimModule(g, [linalg.zeros((1, 1)) for _ in range(g.dim)], [(Fraction(0),) * g.rank], (0,) * g.rank)


class TruncationTooSmall(ValueError):
    pass


def weyl_dimension(rs, mu) -> Fraction:
    """prod_{a>0} (mu + rho, a)/(rho, a)."""
    if isinstance(mu, WeightVec):
        mu = rs.fund_to_root(mu).coords
    out = Fraction(1)
    for a in rs.positive_roots:
        out *= rs.pairing([x + r for x, r in zip(mu, rs.rho.coords)], a) / rs.pairing(rs.rho, a)
    return out


def irrep(g: SplitLieAlgebra, mu, m: int | None = None) -> FinDimModule:
    """Irreducible quotient of M_mu by the radical of the Shapovalov form."""
    rs = g.rs
    if not rs.is_dominant_integral(mu):
        raise ValueError("highest weight must be dominant integral")
    lam = _lead(g, mu)
    if m is None:
        m = int(2 * sum(lam)) + 1
    V = VermaModule(g, lam, m)
    proj = {}
    piv = {}
    for gm in V.weights:
        if V.dim(gm) == 0:
            continue
        G = V.shapovalov_gram(gm)
        _, pv = linalg.rref(G)
        if not pv:
            continue
        piv[gm] = pv
        proj[gm] = linalg.solve(G[:, pv], G, "projecting onto the irreducible quotient")
    deepest = [gm for gm in V.weights if -sum(gm) == m]
    if any(gm in piv for gm in deepest):
        raise TruncationTooSmall(f"depth {m} does not exhaust the weight support")
    order = [gm for gm in V.weights if gm in piv]
    offset = {}
    weights = []
    n = 0
    for gm in order:
        offset[gm] = n
        n += len(piv[gm])
        weights += [tuple(a + b for a, b in zip(lam, gm))] * len(piv[gm])
    mats = []
    for i in range(g.dim):
        mat = linalg.zeros((n, n))
        for gm in order:
            tgt = V.target(i, gm)
            if tgt not in piv:
                continue
            A = V.gen_matrix(i, gm)
            for k, col in enumerate(piv[gm]):
                img = proj[tgt] @ A[:, col]
                for r, c in enumerate(img):
                    if c != 0:
                        mat[offset[tgt] + r, offset[gm] + k] = c
        mats.append(mat)
    return FinDimModule(g, mats, weights, lam)
