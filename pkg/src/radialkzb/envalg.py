"""Split simple Lie algebras and PBW arithmetic in their enveloping algebras.

Root vectors are stored in a rational "hatted" normalization: ``E[a]`` is a
matrix-unit type root vector with ``E[-a] = E[a]^T`` and Chevalley involution
``theta(X) = -X^T``. The Killing-normalized root vector is ``E[a]/c_a`` with
``c_a**2 = n_a := K(E[a], E[-a])``; keeping ``n_a`` explicit avoids the
irrational square roots (sl3 has ``n_a = 6``). Quadratic tensors such as
``e_{-a} (x) e_a`` are therefore written ``E[-a] (x) E[a] / n_a``.

The Cartan basis is ``h_i = t_{alpha_i}``, so ``alpha_j(h_i)`` is the Killing
Gram matrix. Orthonormal-basis sums are Gram-inverse contractions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import linalg
from .rootdata import RootSystem, build
from .scalars import is_zero

Mono = tuple  # non-decreasing tuple of basis indices


class NotInSubalgebra(ValueError):
    pass


class UEA:
    """PBW arithmetic for U(L), L given by a bracket table on an ordered basis."""

    def __init__(self, names: Sequence[str], bracket: Sequence[Sequence[dict]]):
        self.names = tuple(names)
        self.dim = len(names)
        self.bracket = bracket
        self._mg: dict = {}
        self._mm: dict = {}

    def mono_times_gen(self, m: Mono, g: int) -> dict:
        """Normal form of (monomial) * (generator)."""
        if not m or m[-1] <= g:
            return {m + (g,): Fraction(1)}
        key = (m, g)
        hit = self._mg.get(key)
        if hit is not None:
            return hit
        x = m[-1]
        mp = m[:-1]
        out: dict = {}
        # m' x g = (m' g) x + m' [x, g]
        for mono, c in self.mono_times_gen(mp, g).items():
            for mono2, c2 in self.mono_times_gen(mono, x).items():
                out[mono2] = out.get(mono2, 0) + c * c2
        for k, c in self.bracket[x][g].items():
            for mono2, c2 in self.mono_times_gen(mp, k).items():
                out[mono2] = out.get(mono2, 0) + c * c2
        out = {k: v for k, v in out.items() if v != 0}
        self._mg[key] = out
        return out

    def mono_mul(self, a: Mono, b: Mono) -> dict:
        if not b:
            return {a: Fraction(1)}
        if not a:
            return {b: Fraction(1)}
        key = (a, b)
        hit = self._mm.get(key)
        if hit is not None:
            return hit
        cur = {a: Fraction(1)}
        for g in b:
            nxt: dict = {}
            for mono, c in cur.items():
                for mono2, c2 in self.mono_times_gen(mono, g).items():
                    nxt[mono2] = nxt.get(mono2, 0) + c * c2
            cur = {k: v for k, v in nxt.items() if v != 0}
        self._mm[key] = cur
        return cur

    def normalize_word(self, word: Iterable[int]) -> dict:
        cur = {(): Fraction(1)}
        for g in word:
            nxt: dict = {}
            for mono, c in cur.items():
                for mono2, c2 in self.mono_times_gen(mono, g).items():
                    nxt[mono2] = nxt.get(mono2, 0) + c * c2
            cur = {k: v for k, v in nxt.items() if v != 0}
        return cur

    def mono_str(self, m: Mono) -> str:
        if not m:
            return "1"
        parts = []
        i = 0
        while i < len(m):
            j = i
            while j < len(m) and m[j] == m[i]:
                j += 1
            p = j - i
            parts.append(self.names[m[i]] + (f"^{p}" if p > 1 else ""))
            i = j
        return "*".join(parts)


def _add_into(d: dict, k, v):
    s = d.get(k)
    s = v if s is None else s + v
    if is_zero(s):
        d.pop(k, None)
    else:
        d[k] = s


class UEAElement:
    """Element of U(L) as ``{PBW monomial: coefficient}``."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: UEA, terms: dict | None = None):
        self.alg = alg
        self.terms = {k: v for k, v in (terms or {}).items() if not is_zero(v)}

    @classmethod
    def gen(cls, alg: UEA, i: int, coeff=Fraction(1)) -> "UEAElement":
        return cls(alg, {(i,): coeff})

    @classmethod
    def one(cls, alg: UEA, coeff=Fraction(1)) -> "UEAElement":
        return cls(alg, {(): coeff})

    @classmethod
    def from_word(cls, alg: UEA, word: Iterable[int]) -> "UEAElement":
        return cls(alg, alg.normalize_word(word))

    def __add__(self, other):
        if not isinstance(other, UEAElement):
            other = UEAElement.one(self.alg, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return UEAElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return UEAElement(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, UEAElement):
            out: dict = {}
            for a, ca in self.terms.items():
                for b, cb in other.terms.items():
                    cab = ca * cb
                    for m, c in self.alg.mono_mul(a, b).items():
                        _add_into(out, m, cab * c)
            return UEAElement(self.alg, out)
        return UEAElement(self.alg, {k: v * other for k, v in self.terms.items()})

    def __rmul__(self, other):
        return UEAElement(self.alg, {k: other * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, UEAElement):
            return (self - other).is_zero()
        return (self - UEAElement.one(self.alg, other)).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=-1)

    def map_coeffs(self, f: Callable) -> "UEAElement":
        return UEAElement(self.alg, {k: f(v) for k, v in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({v})*{self.alg.mono_str(k)}" for k, v in sorted(self.terms.items()))


def commutator(a, b):
    return a * b - b * a


class TensorElement:
    """Element of U(L_1) (x) ... (x) U(L_n) as ``{(mono_1, ..., mono_n): coeff}``.

    Coefficients may be exact scalars or any commutative ring elements
    (e.g. symbolic functions on the torus).
    """

    __slots__ = ("algs", "terms")

    def __init__(self, algs: Sequence[UEA], terms: dict | None = None):
        self.algs = tuple(algs)
        self.terms = {k: v for k, v in (terms or {}).items() if not is_zero(v)}

    @property
    def nlegs(self) -> int:
        return len(self.algs)

    @classmethod
    def pure(cls, algs: Sequence[UEA], monos: Sequence[Mono], coeff=Fraction(1)) -> "TensorElement":
        return cls(algs, {tuple(monos): coeff})

    @classmethod
    def one(cls, algs: Sequence[UEA], coeff=Fraction(1)) -> "TensorElement":
        return cls(algs, {tuple(() for _ in algs): coeff})

    @classmethod
    def from_factors(cls, factors: Sequence[UEAElement], coeff=Fraction(1)) -> "TensorElement":
        algs = [f.alg for f in factors]
        out = {(): coeff}
        for f in factors:
            out = {k + (m,): c * v for k, c in out.items() for m, v in f.terms.items()}
        return cls(algs, out)

    def __add__(self, other):
        if not isinstance(other, TensorElement):
            if is_zero(other):
                return self
            other = TensorElement.one(self.algs, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return TensorElement(self.algs, out)

    __radd__ = __add__

    def __neg__(self):
        return TensorElement(self.algs, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TensorElement):
            if len(other.algs) != len(self.algs):
                raise ValueError("leg count mismatch")
            out: dict = {}
            algs = self.algs
            for ka, ca in self.terms.items():
                for kb, cb in other.terms.items():
                    partial = {(): Fraction(1)}
                    for leg, (a, b) in enumerate(zip(ka, kb)):
                        mm = algs[leg].mono_mul(a, b)
                        partial = {p + (m,): c * c2 for p, c in partial.items() for m, c2 in mm.items()}
                    cab = ca * cb
                    for k, c in partial.items():
                        _add_into(out, k, cab * c)
            return TensorElement(self.algs, out)
        return TensorElement(self.algs, {k: v * other for k, v in self.terms.items()})

    def __rmul__(self, other):
        return TensorElement(self.algs, {k: other * v for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, TensorElement):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def map_coeffs(self, f: Callable) -> "TensorElement":
        return TensorElement(self.algs, {k: f(v) for k, v in self.terms.items()})

    def permute(self, perm: Sequence[int]) -> "TensorElement":
        """Leg ``i`` of the result is leg ``perm[i]`` of self."""
        algs = [self.algs[p] for p in perm]
        return TensorElement(algs, {tuple(k[p] for p in perm): v for k, v in self.terms.items()})

    def embed(self, target_algs: Sequence[UEA], legs: Sequence[int]) -> "TensorElement":
        """Place leg ``i`` of self into leg ``legs[i]`` of a bigger tensor."""
        n = len(target_algs)
        out = {}
        for k, v in self.terms.items():
            key = [()] * n
            for i, leg in enumerate(legs):
                key[leg] = k[i]
            out[tuple(key)] = v
        return TensorElement(target_algs, out)

    def contract(self, i: int, j: int) -> "TensorElement":
        """Multiply leg i into leg j (result leg order drops i): m(x_i (x) x_j)."""
        alg = self.algs[j]
        if self.algs[i] is not alg:
            raise ValueError("contracted legs must share an algebra")
        keep = [l for l in range(self.nlegs) if l != i]
        out: dict = {}
        for k, v in self.terms.items():
            for m, c in alg.mono_mul(k[i], k[j]).items():
                key = tuple(m if l == j else k[l] for l in keep)
                _add_into(out, key, v * c)
        return TensorElement([self.algs[l] for l in keep], out)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items(), key=lambda kv: kv[0]):
            legs = " (x) ".join(a.mono_str(m) for a, m in zip(self.algs, k))
            parts.append(f"({v})*[{legs}]")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# matrix realizations


def _unit(n: int, i: int, j: int) -> np.ndarray:
    a = linalg.zeros((n, n))
    a[i, j] = Fraction(1)
    return a


def _realization(cartan_type: str) -> dict:
    """Positive root vectors (keyed by simple-root coordinates) as matrices."""
    if cartan_type == "A1":
        half = Fraction(1, 2)
        return {(1,): _unit(2, 0, 1) * half}
    if cartan_type == "A2":
        return {(1, 0): _unit(3, 0, 1), (0, 1): _unit(3, 1, 2), (1, 1): _unit(3, 0, 2)}
    if cartan_type == "B2":
        # sp4 = {[[A, B], [C, -A^T]] : B, C symmetric}; alpha_1 = 2e_2 (long), alpha_2 = e_1 - e_2
        return {
            (1, 0): _unit(4, 1, 3),
            (0, 1): _unit(4, 0, 1) - _unit(4, 3, 2),
            (1, 1): _unit(4, 0, 3) + _unit(4, 1, 2),
            (1, 2): _unit(4, 0, 2),
        }
    raise ValueError(f"no matrix realization for {cartan_type}")


def _comm(a, b):
    return a @ b - b @ a


class SplitLieAlgebra:
    """Split simple Lie algebra with rational root vectors, its k and U-algebras.

    Basis index layout (PBW order): negative roots by decreasing height, then
    h_1..h_r, then positive roots by increasing height.
    """

    def __init__(self, rs: RootSystem):
        self.rs = rs
        r = rs.rank
        pos = list(rs.positive_roots)
        neg_order = sorted(pos, key=lambda a: (-sum(a), tuple(-c for c in a)))
        self.npos = len(pos)
        self.rank = r
        self.dim = 2 * self.npos + r
        self.basis_roots: list = [tuple(-c for c in a) for a in neg_order] + [None] * r + pos
        self._root_index = {a: i for i, a in enumerate(self.basis_roots) if a is not None}
        self.h_index = list(range(self.npos, self.npos + r))

        real = _realization(rs.cartan_type)
        mats: list = [None] * self.dim
        for a, m in real.items():
            mats[self._root_index[a]] = m
            mats[self._root_index[tuple(-c for c in a)]] = m.T.copy()
        # provisional Cartan basis [E_i, E_-i]
        for i in range(r):
            ai = rs.simple_roots[i]
            mats[self.h_index[i]] = _comm(mats[self._root_index[ai]], mats[self._root_index[tuple(-c for c in ai)]])
        self._flat_basis = np.array([m.flatten() for m in mats], dtype=object).T
        self.matrices = mats
        kill = lambda x, y: np.trace(self._ad(x) @ self._ad(y))
        self.n = {}
        for a in pos:
            ea = mats[self._root_index[a]]
            fa = mats[self._root_index[tuple(-c for c in a)]]
            self.n[a] = kill(ea, fa)
            self.n[tuple(-c for c in a)] = self.n[a]
        # switch to h_i = t_{alpha_i} = [E_a, E_-a]/n_a
        for i in range(r):
            ai = rs.simple_roots[i]
            mats[self.h_index[i]] = mats[self.h_index[i]] * (Fraction(1) / self.n[ai])
        self._flat_basis = np.array([m.flatten() for m in mats], dtype=object).T
        self.matrices = mats
        self.killing = np.array(
            [[kill(mats[i], mats[j]) for j in range(self.dim)] for i in range(self.dim)], dtype=object
        )
        self.bracket = [[self._decompose(_comm(mats[i], mats[j])) for j in range(self.dim)] for i in range(self.dim)]
        self.names = [self._name(i) for i in range(self.dim)]
        self.U = UEA(self.names, self.bracket)
        self._check_roots()
        self._build_k()
        self.Uh = UEA([f"h{a + 1}" for a in range(r)], [[{} for _ in range(r)] for _ in range(r)])

    # construction helpers

    def _decompose(self, m: np.ndarray) -> dict:
        x = linalg.solve(self._flat_basis, m.flatten(), "decomposing into the Lie basis")
        return {i: c for i, c in enumerate(x) if c != 0}

    def _ad(self, m: np.ndarray) -> np.ndarray:
        cols = []
        for b in self.matrices:
            cols.append(linalg.solve(self._flat_basis, _comm(m, b).flatten()))
        return np.array(cols, dtype=object).T

    def _name(self, i: int) -> str:
        a = self.basis_roots[i]
        if a is None:
            return f"h{i - self.npos + 1}"
        return "E[" + ",".join(str(c) for c in a) + "]"

    def _check_roots(self):
        rs = self.rs
        for i, a in enumerate(self.basis_roots):
            if a is None:
                continue
            for hpos, hi in enumerate(self.h_index):
                expect = rs.pairing(rs.simple_roots[hpos], a)
                got = self.bracket[hi][i].get(i, 0)
                if got != expect or len(self.bracket[hi][i]) > (1 if got else 0):
                    raise AssertionError(f"root vector {self.names[i]} has wrong weight")

    def _build_k(self):
        pos = list(self.rs.positive_roots)
        self.k_roots = pos
        self.y_in_g = []
        for a in pos:
            self.y_in_g.append({self.e(a): Fraction(1), self.e(tuple(-c for c in a)): Fraction(-1)})
        # [Y_i, Y_j] inside k, in the Y basis
        ymat = [self.matrices[self.e(a)] - self.matrices[self.e(tuple(-c for c in a))] for a in pos]
        flat = np.array([m.flatten() for m in ymat], dtype=object).T
        kb = []
        for i in range(len(pos)):
            row = []
            for j in range(len(pos)):
                try:
                    x = linalg.solve(flat, _comm(ymat[i], ymat[j]).flatten())
                except linalg.InconsistentSystem as exc:  # pragma: no cover - structural
                    raise AssertionError("k is not closed under the bracket") from exc
                row.append({t: c for t, c in enumerate(x) if c != 0})
            kb.append(row)
        self.k_bracket = kb
        self.Uk = UEA([f"Y[{','.join(str(c) for c in a)}]" for a in pos], kb)

    # symbols

    def e(self, alpha) -> int:
        """Basis index of the (hatted) root vector E[alpha]."""
        return self._root_index[tuple(alpha)]

    def h(self, a: int) -> int:
        return self.h_index[a]

    def y(self, alpha) -> int:
        """Index of Y[alpha] in the k basis (alpha positive)."""
        return self.k_roots.index(tuple(alpha))

    def weight_of(self, i: int) -> tuple:
        a = self.basis_roots[i]
        return (0,) * self.rank if a is None else a

    def is_negative(self, i: int) -> bool:
        return i < self.npos

    def is_positive(self, i: int) -> bool:
        return i >= self.npos + self.rank

    def n_of(self, alpha) -> Fraction:
        return self.n[tuple(alpha)]

    # elements

    def E(self, alpha, coeff=Fraction(1)) -> UEAElement:
        return UEAElement.gen(self.U, self.e(alpha), coeff)

    def H(self, a: int, coeff=Fraction(1)) -> UEAElement:
        return UEAElement.gen(self.U, self.h(a), coeff)

    def Y(self, alpha) -> UEAElement:
        return self.E(alpha) - self.E(tuple(-c for c in alpha))

    def Yk(self, alpha, coeff=Fraction(1)) -> UEAElement:
        return UEAElement.gen(self.Uk, self.y(alpha), coeff)

    def t(self, alpha) -> UEAElement:
        """t_alpha in the h basis."""
        out = UEAElement(self.U)
        for a, c in enumerate(self.rs.t_coords(alpha)):
            if c:
                out = out + self.H(a, c)
        return out

    def lie_element(self, d: dict) -> UEAElement:
        return UEAElement(self.U, {(i,): c for i, c in d.items()})

    def lie_bracket(self, i: int, j: int) -> dict:
        return self.bracket[i][j]

    def casimir(self) -> UEAElement:
        """Sum G^{-1}_{ab} h_a h_b + sum_{a in R} E[a]E[-a]/n_a."""
        gi = self.rs.gram_inverse
        out = UEAElement(self.U)
        for a in range(self.rank):
            for b in range(self.rank):
                if gi[a][b]:
                    out = out + self.H(a) * self.H(b) * gi[a][b]
        for al in self.rs.roots:
            neg = tuple(-c for c in al)
            out = out + self.E(al) * self.E(neg) * (Fraction(1) / self.n[al])
        return out

    def casimir_second_form(self) -> UEAElement:
        """Sum x_j^2 + 2 t_rho + 2 sum_{a>0} e_{-a} e_a."""
        gi = self.rs.gram_inverse
        out = UEAElement(self.U)
        for a in range(self.rank):
            for b in range(self.rank):
                if gi[a][b]:
                    out = out + self.H(a) * self.H(b) * gi[a][b]
        out = out + self.t(self.rs.rho.coords) * 2
        for al in self.rs.positive_roots:
            neg = tuple(-c for c in al)
            out = out + self.E(neg) * self.E(al) * (Fraction(2) / self.n[al])
        return out

    def theta_index(self, i: int) -> tuple[int, Fraction]:
        a = self.basis_roots[i]
        if a is None:
            return i, Fraction(-1)
        return self.e(tuple(-c for c in a)), Fraction(-1)

    def theta(self, x: UEAElement) -> UEAElement:
        out: dict = {}
        for m, c in x.terms.items():
            word = []
            sign = Fraction(1)
            for g in m:
                j, s = self.theta_index(g)
                word.append(j)
                sign *= s
            for mm, cc in self.U.normalize_word(word).items():
                _add_into(out, mm, c * sign * cc)
        return UEAElement(self.U, out)

    # U(k) <-> U(g)

    def k_to_g(self, x: UEAElement) -> UEAElement:
        if x.alg is self.U:
            return x
        out = UEAElement(self.U)
        for m, c in x.terms.items():
            term = UEAElement.one(self.U, c)
            for i in m:
                term = term * UEAElement(self.U, {(g,): v for g, v in self.y_in_g[i].items()})
            out = out + term
        return out

    def g_to_k(self, x: UEAElement) -> UEAElement:
        """Y-basis normal form of an element of U(g) lying in U(k)."""
        d = max(x.degree(), 0)
        monos = [m for m in _monomials(len(self.k_roots), d)]
        images = [self.k_to_g(UEAElement(self.Uk, {m: Fraction(1)})) for m in monos]
        keys = sorted(set().union(x.terms, *[im.terms for im in images]))
        idx = {k: i for i, k in enumerate(keys)}
        a = linalg.zeros((len(keys), len(monos)))
        for j, im in enumerate(images):
            for k, c in im.terms.items():
                a[idx[k], j] = c
        b = linalg.zeros(len(keys))
        for k, c in x.terms.items():
            b[idx[k]] = c
        try:
            sol = linalg.solve(a, b, "expressing in the Y basis")
        except linalg.InconsistentSystem as exc:
            raise NotInSubalgebra("element is not in U(k)") from exc
        return UEAElement(self.Uk, {m: c for m, c in zip(monos, sol) if c != 0})

    def antipode_k(self, x: UEAElement) -> UEAElement:
        """S(y) = -y extended as an anti-homomorphism."""
        if x.alg is not self.Uk:
            x = self.g_to_k(x)
        out: dict = {}
        for m, c in x.terms.items():
            sign = Fraction(-1) ** len(m)
            for mm, cc in self.Uk.normalize_word(reversed(m)).items():
                _add_into(out, mm, c * sign * cc)
        return UEAElement(self.Uk, out)

    def coproduct_iter(self, x: UEAElement, nfactors: int) -> TensorElement:
        """(nfactors-1)-fold iterated coproduct of x in U(k)."""
        if x.alg is not self.Uk:
            x = self.g_to_k(x)
        algs = [self.Uk] * nfactors
        out = TensorElement(algs)
        for m, c in x.terms.items():
            term = TensorElement.one(algs, c)
            for i in m:
                prim = TensorElement(algs, {tuple((i,) if l == leg else () for l in range(nfactors)): Fraction(1) for leg in range(nfactors)})
                term = term * prim
            out = out + term
        return out


def _monomials(n: int, d: int) -> list[Mono]:
    """All non-decreasing tuples over range(n) of length <= d."""
    out = [()]
    frontier = [()]
    for _ in range(d):
        nxt = []
        for m in frontier:
            start = m[-1] if m else 0
            for i in range(start, n):
                nxt.append(m + (i,))
        out.extend(nxt)
        frontier = nxt
    return out


@lru_cache(maxsize=None)
def lie_algebra(cartan_type: str) -> SplitLieAlgebra:
    return SplitLieAlgebra(build(cartan_type))


def pbw_normalize(g: SplitLieAlgebra, word: Sequence[int]) -> UEAElement:
    return UEAElement.from_word(g.U, word)
