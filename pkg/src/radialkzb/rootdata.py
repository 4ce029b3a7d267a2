"""Root systems of split simple Lie algebras of rank at most two.

Weights are stored in simple-root coordinates. The bilinear form is the
Killing-form pairing, normalized so that a long root has squared length
1/h^vee (h^vee the dual Coxeter number).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Sequence

SUPPORTED_TYPES = ("A1", "A2", "B2")

# Cartan matrix a_ij = 2(a_i, a_j)/(a_i, a_i), relative squared lengths, dual Coxeter number
_TYPE_DATA = {
    "A1": (((2,),), (1,), 2),
    "A2": (((2, -1), (-1, 2)), (1, 1), 3),
    "B2": (((2, -1), (-2, 2)), (2, 1), 3),
}


class UnsupportedType(ValueError):
    pass


class BasisMismatch(ValueError):
    pass


@dataclass(frozen=True)
class WeightVec:
    """Exact weight; ``basis`` is ``"root"`` (simple roots) or ``"fund"``."""

    coords: tuple
    basis: str = "root"

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        if self.basis not in ("root", "fund"):
            raise ValueError(f"unknown basis tag {self.basis!r}")

    def _other(self, other) -> tuple:
        if isinstance(other, WeightVec):
            if other.basis != self.basis:
                raise BasisMismatch(f"{self.basis} vs {other.basis}")
            oc = other.coords
        else:
            oc = tuple(other)
        if len(oc) != len(self.coords):
            raise BasisMismatch("rank mismatch")
        return oc

    def __add__(self, other):
        return WeightVec(tuple(a + b for a, b in zip(self.coords, self._other(other))), self.basis)

    __radd__ = __add__

    def __sub__(self, other):
        return WeightVec(tuple(a - b for a, b in zip(self.coords, self._other(other))), self.basis)

    def __rsub__(self, other):
        return WeightVec(tuple(b - a for a, b in zip(self.coords, self._other(other))), self.basis)

    def __neg__(self):
        return WeightVec(tuple(-a for a in self.coords), self.basis)

    def __mul__(self, k):
        return WeightVec(tuple(a * k for a in self.coords), self.basis)

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def _mat_inverse(m: Sequence[Sequence[Fraction]]) -> tuple:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return tuple(tuple(row[n:]) for row in a)


@dataclass(frozen=True)
class RootSystem:
    cartan_type: str
    rank: int
    cartan_matrix: tuple
    gram: tuple
    positive_roots: tuple
    dual_coxeter: int
    simple_roots: tuple = field(init=False)

    def __post_init__(self):
        r = self.rank
        object.__setattr__(
            self, "simple_roots", tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
        )

    # basic data

    @cached_property
    def negative_roots(self) -> tuple:
        return tuple(tuple(-c for c in a) for a in self.positive_roots)

    @cached_property
    def roots(self) -> tuple:
        return self.positive_roots + self.negative_roots

    @cached_property
    def gram_inverse(self) -> tuple:
        return _mat_inverse(self.gram)

    @cached_property
    def rho(self) -> WeightVec:
        s = [Fraction(0)] * self.rank
        for a in self.positive_roots:
            for i, c in enumerate(a):
                s[i] += Fraction(c, 2)
        return WeightVec(tuple(s))

    def weight(self, coords: Iterable, basis: str = "root") -> WeightVec:
        w = WeightVec(tuple(coords), basis)
        if len(w) != self.rank:
            raise BasisMismatch("rank mismatch")
        return w

    def zero(self) -> WeightVec:
        return WeightVec((0,) * self.rank)

    # change of basis: fundamental weight w_i satisfies (w_i, a_j^vee) = delta_ij

    def fund_to_root(self, w: WeightVec) -> WeightVec:
        if w.basis == "root":
            return w
        # w = sum_i c_i omega_i; omega_i = sum_j (C^{-T})_{ij} alpha_j with C the Cartan matrix
        cinv = _mat_inverse(self.cartan_matrix)
        coords = tuple(sum(w.coords[i] * cinv[j][i] for i in range(self.rank)) for j in range(self.rank))
        return WeightVec(coords, "root")

    def root_to_fund(self, w: WeightVec) -> WeightVec:
        if w.basis == "fund":
            return w
        return WeightVec(tuple(self.coroot_pairing(w, a) for a in self.simple_roots), "fund")

    def _root_coords(self, x) -> tuple:
        if isinstance(x, WeightVec):
            x = self.fund_to_root(x).coords
        x = tuple(x)
        if len(x) != self.rank:
            raise BasisMismatch("rank mismatch")
        return x

    # pairings

    def pairing(self, lam, mu) -> Fraction:
        a, b = self._root_coords(lam), self._root_coords(mu)
        g = self.gram
        return sum((a[i] * g[i][j] * b[j] for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    def norm2(self, lam) -> Fraction:
        return self.pairing(lam, lam)

    def coroot_pairing(self, lam, alpha) -> Fraction:
        """(lam, alpha^vee) = 2(lam, alpha)/(alpha, alpha)."""
        return 2 * self.pairing(lam, alpha) / self.pairing(alpha, alpha)

    def on_h(self, lam) -> tuple:
        """Values lam(h_a) on the rational Cartan basis h_a = t_{alpha_a}."""
        c = self._root_coords(lam)
        g = self.gram
        return tuple(sum((g[a][j] * c[j] for j in range(self.rank)), Fraction(0)) for a in range(self.rank))

    def t_coords(self, alpha) -> tuple:
        """Coordinates of t_alpha in the basis h_a (t is linear in alpha)."""
        return tuple(Fraction(c) for c in self._root_coords(alpha))

    # lattice combinatorics

    @staticmethod
    def height(gamma) -> int:
        return sum(gamma)

    def qminus(self, m: int) -> list[tuple]:
        """Integer tuples gamma in Q_- with height(-gamma) <= m, sorted."""
        if m < 0:
            raise ValueError("height bound must be nonnegative")
        out = []
        for c in product(range(m + 1), repeat=self.rank):
            if sum(c) <= m:
                out.append(tuple(-x for x in c))
        out.sort(key=lambda g: (-sum(g), g))
        return out

    def enumerate_qminus(self, m: int) -> list[WeightVec]:
        return [WeightVec(g) for g in self.qminus(m)]

    def dominance_leq(self, a, b) -> bool:
        """a <= b iff b - a is a nonnegative integer combination of simple roots."""
        d = [y - x for x, y in zip(self._root_coords(a), self._root_coords(b))]
        return all(Fraction(x).denominator == 1 and x >= 0 for x in d)

    def simple_reflection(self, i: int, lam) -> WeightVec:
        c = list(self._root_coords(lam))
        k = self.coroot_pairing(c, self.simple_roots[i])
        c[i] -= k
        return WeightVec(tuple(c))

    def is_dominant_integral(self, lam) -> bool:
        return all(
            (k := self.coroot_pairing(lam, a)).denominator == 1 and k >= 0 for a in self.simple_roots
        )

    def hc_obstruction(self, lam, gamma) -> Fraction:
        """(2(lam+rho)+gamma, gamma)."""
        lr = [2 * (x + r) + g for x, r, g in zip(self._root_coords(lam), self.rho.coords, gamma)]
        return self.pairing(lr, gamma)

    def is_hc_generic(self, lam, m: int) -> bool:
        """Truncated Harish-Chandra genericity up to height m."""
        return all(self.hc_obstruction(lam, g) != 0 for g in self.qminus(m) if any(g))

    def is_regular(self, lam) -> bool:
        return all(self.coroot_pairing(lam, a).denominator != 1 for a in self.positive_roots)

    def root_index(self, alpha) -> int:
        return self.roots.index(tuple(alpha))


def _closure_positive_roots(cartan, rank) -> list[tuple]:
    """Brute-force closure of the simple roots under simple reflections."""
    simple = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(rank):
                # <beta, alpha_i^vee> = sum_j beta_j a_ij
                k = sum(beta[j] * cartan[i][j] for j in range(rank))
                img = tuple(b - (k if j == i else 0) for j, b in enumerate(beta))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    pos = [r for r in seen if all(c >= 0 for c in r)]
    pos.sort(key=lambda r: (sum(r), tuple(-c for c in r)))
    return pos


@lru_cache(maxsize=None)
def build(cartan_type: str) -> RootSystem:
    if cartan_type not in _TYPE_DATA:
        raise UnsupportedType(f"unsupported Cartan type {cartan_type!r}; supported: {', '.join(SUPPORTED_TYPES)}")
    cartan, rel, hvee = _TYPE_DATA[cartan_type]
    rank = len(cartan)
    long2 = max(rel)
    scale = Fraction(1, hvee) / long2
    sq = [scale * d for d in rel]
    gram = tuple(tuple(cartan[i][j] * sq[i] / 2 for j in range(rank)) for i in range(rank))
    pos = _closure_positive_roots(cartan, rank)
    return RootSystem(cartan_type, rank, tuple(tuple(r) for r in cartan), gram, tuple(pos), hvee)
