"""Exact symbolic elements of the coefficient ring R of functions on the torus.

An element is ``N / prod_{a>0} (1 - xi_{-2a})^{k_a}`` with ``N`` a Laurent
polynomial in the characters ``xi_mu`` (mu in the root lattice, stored in
simple-root coordinates). Zero testing is exact (``N == 0``); evaluation at a
rational torus point is exact; expansion into a truncated series in the
``xi_{-alpha_i}`` is available when the numerator has nonpositive exponents.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .rootdata import RootSystem


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            s = out.get(k, 0) + va * vb
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
    return out


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return out


class RFunc:
    __slots__ = ("rs", "num", "den")

    def __init__(self, rs: RootSystem, num: dict, den: Sequence[int] | None = None):
        self.rs = rs
        self.num = {k: v for k, v in num.items() if v != 0}
        self.den = tuple(den) if den is not None else (0,) * len(rs.positive_roots)

    # constructors

    @classmethod
    def const(cls, rs: RootSystem, c) -> "RFunc":
        return cls(rs, {(0,) * rs.rank: c} if c != 0 else {})

    @classmethod
    def xi(cls, rs: RootSystem, mu, c=Fraction(1)) -> "RFunc":
        return cls(rs, {tuple(int(x) for x in mu): c})

    @classmethod
    def inv_d(cls, rs: RootSystem, alpha_pos, k: int = 1, num_weight=None, c=Fraction(1)) -> "RFunc":
        """c * xi_{num_weight} / (1 - xi_{-2 alpha})^k, alpha positive."""
        den = [0] * len(rs.positive_roots)
        den[rs.positive_roots.index(tuple(alpha_pos))] = k
        w = tuple(num_weight) if num_weight is not None else (0,) * rs.rank
        return cls(rs, {w: c}, den)

    # arithmetic

    def _lift(self, other) -> "RFunc":
        if isinstance(other, RFunc):
            return other
        return RFunc.const(self.rs, other)

    def _d_poly(self, i: int) -> dict:
        a = self.rs.positive_roots[i]
        return {(0,) * self.rs.rank: Fraction(1), tuple(-2 * c for c in a): Fraction(-1)}

    def _raise_to(self, den: Sequence[int]) -> dict:
        num = self.num
        for i, (have, want) in enumerate(zip(self.den, den)):
            for _ in range(want - have):
                num = _poly_mul(num, self._d_poly(i))
        return num

    def __add__(self, other):
        if not isinstance(other, RFunc):
            if other == 0:
                return self
            other = RFunc.const(self.rs, other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RFunc(self.rs, _poly_add(self.num, other.num), self.den).reduce()
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        return RFunc(self.rs, _poly_add(self._raise_to(den), other._raise_to(den)), den).reduce()

    __radd__ = __add__

    def __neg__(self):
        return RFunc(self.rs, {k: -v for k, v in self.num.items()}, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RFunc):
            if not self.num or not other.num:
                return RFunc(self.rs, {})
            den = tuple(a + b for a, b in zip(self.den, other.den))
            return RFunc(self.rs, _poly_mul(self.num, other.num), den)
        if other == 0:
            return RFunc(self.rs, {})
        return RFunc(self.rs, {k: v * other for k, v in self.num.items()}, self.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RFunc):
            raise TypeError("division by a ring element is not supported")
        return self * (Fraction(1) / other)

    def __pow__(self, k: int):
        out = RFunc.const(self.rs, Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.num

    def __eq__(self, other):
        if isinstance(other, (RFunc, int, Fraction)) or hasattr(other, "im"):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.num)

    def reduce(self) -> "RFunc":
        """Cancel common factors (1 - xi_{-2a}) between numerator and denominator."""
        if not self.num or not any(self.den):
            return self
        num, den = self.num, list(self.den)
        for i, a in enumerate(self.rs.positive_roots):
            while den[i] > 0:
                q = _divide_one_minus(num, tuple(-2 * c for c in a))
                if q is None:
                    break
                num = q
                den[i] -= 1
        if tuple(den) == self.den:
            return self
        return RFunc(self.rs, num, den)

    # calculus

    def derivative(self, hvec: Sequence) -> "RFunc":
        """Directional derivative along h = sum_a hvec[a] h_a; d xi_mu = mu(h) xi_mu."""
        rs = self.rs

        def ev(mu):
            vals = rs.on_h(mu)
            return sum((c * v for c, v in zip(hvec, vals)), Fraction(0))

        out = RFunc(rs, {k: v * ev(k) for k, v in self.num.items()}, self.den)
        for i, k in enumerate(self.den):
            if k == 0:
                continue
            a = rs.positive_roots[i]
            # d (1 - xi_{-2a})^{-k} = -k * 2 a(h) xi_{-2a} (1 - xi_{-2a})^{-k-1}
            s = ev(a)
            if s == 0:
                continue
            den = list(self.den)
            den[i] += 1
            shift = tuple(-2 * c for c in a)
            num = {tuple(x + y for x, y in zip(key, shift)): v * (-k) * 2 * s for key, v in self.num.items()}
            out = out + RFunc(rs, num, den)
        return out

    def evaluate(self, t: Sequence[Fraction]):
        """Exact value at the torus point with xi_{-alpha_i} = t[i]."""

        def xi(mu):
            v = Fraction(1)
            for ti, c in zip(t, mu):
                v *= Fraction(ti) ** (-c)
            return v

        n = sum((c * xi(k) for k, c in self.num.items()), Fraction(0))
        d = Fraction(1)
        for a, k in zip(self.rs.positive_roots, self.den):
            if k:
                d *= (1 - xi(tuple(-2 * c for c in a))) ** k
        return n / d

    def expand(self, m: int) -> dict:
        """Truncated expansion {gamma: coeff} with height(-gamma) <= m."""
        for k in self.num:
            if any(c > 0 for c in k):
                raise ValueError("numerator exponent outside Q_-; cannot expand")
        cur = {k: v for k, v in self.num.items() if -sum(k) <= m}
        for a, k in zip(self.rs.positive_roots, self.den):
            if not k:
                continue
            step = 2 * sum(a)
            series = {}
            n = 0
            while n * step <= m:
                series[tuple(-2 * n * c for c in a)] = Fraction(comb(n + k - 1, k - 1))
                n += 1
            nxt: dict = {}
            for ka, va in cur.items():
                for kb, vb in series.items():
                    key = tuple(x + y for x, y in zip(ka, kb))
                    if -sum(key) > m:
                        continue
                    s = nxt.get(key, 0) + va * vb
                    if s == 0:
                        nxt.pop(key, None)
                    else:
                        nxt[key] = s
            cur = nxt
        return cur

    def __repr__(self):
        if not self.num:
            return "0"
        nm = " + ".join(f"{v}*xi{k}" for k, v in sorted(self.num.items()))
        dn = "*".join(
            f"(1-xi{tuple(-2 * c for c in a)})^{k}" for a, k in zip(self.rs.positive_roots, self.den) if k
        )
        return f"({nm})" + (f"/({dn})" if dn else "")


def _divide_one_minus(num: dict, s: tuple) -> dict | None:
    """Exact quotient num / (1 - xi_s), or None if not divisible."""
    i = next(j for j, c in enumerate(s) if c != 0)
    si = s[i]
    cosets: dict = {}
    for key, v in num.items():
        # k with key[i] - k*si in [0, |si|)
        k = key[i] // si if si > 0 else -(key[i] // (-si))
        base = tuple(x - k * y for x, y in zip(key, s))
        cosets.setdefault(base, {})[k] = v
    out: dict = {}
    for base, poly in cosets.items():
        if sum(poly.values()) != 0:
            return None
        ks = sorted(poly)
        acc = 0
        for k in range(ks[0], ks[-1]):
            acc += poly.get(k, 0)
            if acc != 0:
                out[tuple(x + k * y for x, y in zip(base, s))] = acc
    return out


# common coefficient functions, alpha any root


def _pos(rs: RootSystem, alpha) -> tuple[tuple, int]:
    a = tuple(alpha)
    if a in rs.positive_roots:
        return a, 1
    return tuple(-c for c in a), -1


def inv_one_minus(rs: RootSystem, alpha) -> RFunc:
    """1/(1 - xi_{-2 alpha})."""
    b, s = _pos(rs, alpha)
    if s > 0:
        return RFunc.inv_d(rs, b)
    # 1/(1 - xi_{2b}) = -xi_{-2b}/(1 - xi_{-2b})
    return RFunc.inv_d(rs, b, 1, tuple(-2 * c for c in b), Fraction(-1))


def inv_sinh(rs: RootSystem, alpha) -> RFunc:
    """1/(xi_alpha - xi_{-alpha})."""
    b, s = _pos(rs, alpha)
    return RFunc.inv_d(rs, b, 1, tuple(-c for c in b), Fraction(s))


def inv_sinh2(rs: RootSystem, alpha) -> RFunc:
    """(xi_alpha - xi_{-alpha})^{-2}."""
    b, _ = _pos(rs, alpha)
    return RFunc.inv_d(rs, b, 2, tuple(-2 * c for c in b))


def coth(rs: RootSystem, alpha) -> RFunc:
    """(xi_alpha + xi_{-alpha})/(xi_alpha - xi_{-alpha}) = (1 + xi_{-2a})/(1 - xi_{-2a})."""
    b, s = _pos(rs, alpha)
    den = [0] * len(rs.positive_roots)
    den[rs.positive_roots.index(b)] = 1
    return RFunc(rs, {(0,) * rs.rank: Fraction(s), tuple(-2 * c for c in b): Fraction(s)}, den)


def xi(rs: RootSystem, mu, c=Fraction(1)) -> RFunc:
    return RFunc.xi(rs, mu, c)


def const(rs: RootSystem, c) -> RFunc:
    return RFunc.const(rs, c)
