"""Truncated formal series sum_gamma c_gamma xi_{lam+gamma} and differential operators.

Coefficients are pluggable: exact scalars, numpy object arrays (vectors or
matrices), or enveloping-algebra tensors. Products use ``amul`` (matrix
product for two arrays, ``*`` otherwise) with the left factor on the left.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from math import comb, prod
from typing import Callable, Iterable, Sequence

import numpy as np

from .rfunc import RFunc
from .rootdata import RootSystem, WeightVec
from .scalars import format_scalar, is_zero


def amul(a, b):
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        return a @ b
    return a * b


def _height(g) -> int:
    return -sum(g)


def _lead(rs: RootSystem, lam) -> tuple:
    if isinstance(lam, WeightVec):
        lam = rs.fund_to_root(lam).coords
    return tuple(Fraction(c) for c in lam)


class ExponentMismatch(ValueError):
    pass


class FormalSeries:
    """sum_{gamma in Q_-, ht(-gamma) <= m} coeffs[gamma] * xi_{lead + gamma}."""

    __slots__ = ("rs", "lead", "m", "coeffs")

    def __init__(self, rs: RootSystem, lead, m: int, coeffs: dict | None = None):
        self.rs = rs
        self.lead = _lead(rs, lead)
        self.m = m
        out = {}
        for g, c in (coeffs or {}).items():
            g = tuple(int(x) for x in g)
            if any(x > 0 for x in g):
                raise ValueError(f"offset {g} not in Q_-")
            if _height(g) <= m and not is_zero(c):
                out[g] = c
        self.coeffs = out

    @classmethod
    def from_rfunc(cls, f: RFunc, m: int, factor=None) -> "FormalSeries":
        ex = f.expand(m)
        if factor is not None:
            ex = {g: c * factor for g, c in ex.items()}
        return cls(f.rs, (0,) * f.rs.rank, m, ex)

    @classmethod
    def constant(cls, rs: RootSystem, c, m: int, lead=None) -> "FormalSeries":
        return cls(rs, lead if lead is not None else (0,) * rs.rank, m, {(0,) * rs.rank: c})

    def coeff(self, gamma, default=Fraction(0)):
        return self.coeffs.get(tuple(gamma), default)

    def _check(self, other: "FormalSeries"):
        if self.lead != other.lead:
            raise ExponentMismatch(f"leading exponents differ: {self.lead} vs {other.lead}")

    def __add__(self, other):
        if not isinstance(other, FormalSeries):
            if is_zero(other):
                return self
            other = FormalSeries.constant(self.rs, other, self.m, self.lead)
        self._check(other)
        m = min(self.m, other.m)
        out = {g: c for g, c in self.coeffs.items() if _height(g) <= m}
        for g, c in other.coeffs.items():
            if _height(g) > m:
                continue
            out[g] = out[g] + c if g in out else c
        return FormalSeries(self.rs, self.lead, m, out)

    def __neg__(self):
        return FormalSeries(self.rs, self.lead, self.m, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "FormalSeries":
        return FormalSeries(self.rs, self.lead, self.m, {g: c * k for g, c in self.coeffs.items()})

    def map(self, f: Callable) -> "FormalSeries":
        return FormalSeries(self.rs, self.lead, self.m, {g: f(c) for g, c in self.coeffs.items()})

    def mul(self, other: "FormalSeries", op: Callable = amul) -> "FormalSeries":
        m = min(self.m, other.m)
        lead = tuple(a + b for a, b in zip(self.lead, other.lead))
        out: dict = {}
        for ga, ca in self.coeffs.items():
            ha = _height(ga)
            if ha > m:
                continue
            for gb, cb in other.coeffs.items():
                if ha + _height(gb) > m:
                    continue
                g = tuple(x + y for x, y in zip(ga, gb))
                v = op(ca, cb)
                out[g] = out[g] + v if g in out else v
        return FormalSeries(self.rs, lead, m, out)

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return self.mul(other)
        return self.scale(other)

    def truncate(self, m: int) -> "FormalSeries":
        if m > self.m:
            raise ValueError("cannot truncate above the current height")
        return FormalSeries(self.rs, self.lead, m, self.coeffs)

    def shift_lead(self, new_lead) -> "FormalSeries":
        """Re-express with leading exponent new_lead (lead - new_lead must lie in Q_+)."""
        new_lead = _lead(self.rs, new_lead)
        d = tuple(a - b for a, b in zip(self.lead, new_lead))
        if any(x.denominator != 1 or x < 0 for x in d):
            raise ExponentMismatch("shift must be a nonnegative lattice vector")
        d = tuple(int(x) for x in d)
        m = self.m + sum(d)
        return FormalSeries(self.rs, new_lead, m, {tuple(a + b for a, b in zip(g, d)): c for g, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def equals(self, other: "FormalSeries") -> bool:
        if self.lead != other.lead:
            return False
        return (self - other).is_zero()

    def support(self) -> list:
        return sorted(self.coeffs, key=lambda g: (_height(g), g))

    def to_csv(self, fh=None) -> str:
        """Rows gamma_coords,entry_row,entry_col,value (scalars use row=col=0)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma_coords", "entry_row", "entry_col", "value"])
        for g in self.support():
            c = self.coeffs[g]
            key = ";".join(str(x) for x in g)
            if isinstance(c, np.ndarray):
                arr = c.reshape(c.shape[0], -1) if c.ndim > 1 else c.reshape(-1, 1)
                for (i, j), v in np.ndenumerate(arr):
                    if v != 0:
                        w.writerow([key, i, j, format_scalar(v)])
            else:
                w.writerow([key, 0, 0, format_scalar(c)])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def __repr__(self):
        return f"FormalSeries(lead={self.lead}, m={self.m}, terms={len(self.coeffs)})"


# -- constructors for the expanded coefficient ring


def expand_inverse_one_minus(rs: RootSystem, beta, m: int) -> FormalSeries:
    """(1 - xi_{-beta})^{-1} = sum_n xi_{-n beta}, beta strictly positive."""
    beta = tuple(int(b) for b in beta)
    if any(b < 0 for b in beta) or not any(beta):
        raise ValueError("beta must be strictly positive")
    out = {}
    n = 0
    while n * sum(beta) <= m:
        out[tuple(-n * b for b in beta)] = Fraction(1)
        n += 1
    return FormalSeries(rs, (0,) * rs.rank, m, out)


def _binom_series(a: Fraction, nmax: int) -> list:
    """Coefficients of (1 - u)^a up to u^nmax."""
    out = [Fraction(1)]
    c = Fraction(1)
    for n in range(1, nmax + 1):
        c = c * (a - n + 1) / n
        out.append(c * (-1) ** n)
    return out


def delta_series(rs: RootSystem, m: int, sign: int = 1) -> FormalSeries:
    """delta^{sign} = xi_{sign*rho} prod_{a>0} (1 - xi_{-2a})^{sign/2}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cur = {(0,) * rs.rank: Fraction(1)}
    for a in rs.positive_roots:
        step = 2 * sum(a)
        co = _binom_series(Fraction(sign, 2), m // step)
        nxt: dict = {}
        for g, c in cur.items():
            for n, b in enumerate(co):
                gg = tuple(x - 2 * n * y for x, y in zip(g, a))
                if _height(gg) > m:
                    break
                nxt[gg] = nxt.get(gg, 0) + c * b
        cur = nxt
    lead = tuple(sign * r for r in rs.rho.coords)
    return FormalSeries(rs, lead, m, cur)


# -- differential operators


def _multi_range(p: tuple):
    if not p:
        yield ()
        return
    for s0 in range(p[0] + 1):
        for rest in _multi_range(p[1:]):
            yield (s0,) + rest


def _mbinom(p: tuple, s: tuple) -> int:
    return prod(comb(a, b) for a, b in zip(p, s))


class SeriesDiffOp:
    """sum_p c_p(xi) d^p with d^p = prod_a d_{h_a}^{p_a} and c_p series with lead 0."""

    __slots__ = ("rs", "m", "terms")

    def __init__(self, rs: RootSystem, m: int, terms: dict | None = None):
        self.rs = rs
        self.m = m
        out = {}
        for p, s in (terms or {}).items():
            if s.lead != (0,) * rs.rank:
                raise ExponentMismatch("operator coefficients must have leading exponent 0")
            s = s if s.m == m else FormalSeries(rs, s.lead, min(m, s.m), s.coeffs)
            if not s.is_zero():
                out[tuple(p)] = s
        self.terms = out

    @classmethod
    def from_parts(cls, rs: RootSystem, m: int, parts: Iterable) -> "SeriesDiffOp":
        """Build from (p, RFunc or scalar, coefficient object) triples."""
        acc: dict = {}
        for p, f, obj in parts:
            p = tuple(p)
            if isinstance(f, RFunc):
                ex = f.expand(m)
            else:
                ex = {(0,) * rs.rank: f}
            bucket = acc.setdefault(p, {})
            for g, c in ex.items():
                v = obj * c if not isinstance(obj, (int, Fraction)) else c * obj
                bucket[g] = bucket[g] + v if g in bucket else v
        return cls(rs, m, {p: FormalSeries(rs, (0,) * rs.rank, m, b) for p, b in acc.items()})

    def order(self) -> int:
        return max((sum(p) for p in self.terms), default=0)

    def __add__(self, other: "SeriesDiffOp") -> "SeriesDiffOp":
        m = min(self.m, other.m)
        out = {p: s.truncate(m) for p, s in self.terms.items()}
        for p, s in other.terms.items():
            out[p] = out[p] + s.truncate(m) if p in out else s.truncate(m)
        return SeriesDiffOp(self.rs, m, out)

    def __neg__(self):
        return SeriesDiffOp(self.rs, self.m, {p: -s for p, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "SeriesDiffOp":
        return SeriesDiffOp(self.rs, self.m, {p: s.scale(k) for p, s in self.terms.items()})

    def map_coeffs(self, f: Callable) -> "SeriesDiffOp":
        return SeriesDiffOp(self.rs, self.m, {p: s.map(f) for p, s in self.terms.items()})

    def truncate(self, m: int) -> "SeriesDiffOp":
        return SeriesDiffOp(self.rs, m, {p: s.truncate(m) for p, s in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def _dpow(self, mu, p) -> Fraction:
        vals = self.rs.on_h(mu)
        return prod((v ** k for v, k in zip(vals, p)), start=Fraction(1))

    def apply(self, s: FormalSeries, op: Callable = amul) -> FormalSeries:
        m = min(self.m, s.m)
        out: dict = {}
        for p, cs in self.terms.items():
            for gv, v in s.coeffs.items():
                hv = _height(gv)
                if hv > m:
                    continue
                mu = tuple(a + b for a, b in zip(s.lead, gv))
                f = self._dpow(mu, p)
                if f == 0:
                    continue
                for gc, c in cs.coeffs.items():
                    if hv + _height(gc) > m:
                        continue
                    g = tuple(x + y for x, y in zip(gv, gc))
                    w = op(c, v) * f
                    out[g] = out[g] + w if g in out else w
        return FormalSeries(self.rs, s.lead, m, out)

    def _deriv_series(self, s: FormalSeries, p) -> FormalSeries:
        if not any(p):
            return s
        out = {}
        for g, c in s.coeffs.items():
            mu = tuple(a + b for a, b in zip(s.lead, g))
            f = self._dpow(mu, p)
            if f != 0:
                out[g] = c * f
        return FormalSeries(self.rs, s.lead, s.m, out)

    def compose(self, other: "SeriesDiffOp", op: Callable = amul) -> "SeriesDiffOp":
        """self o other by the Leibniz rule."""
        m = min(self.m, other.m)
        out: dict = {}
        for p, a in self.terms.items():
            for q, b in other.terms.items():
                for s in _multi_range(p):
                    coef = _mbinom(p, s)
                    db = self._deriv_series(b, s)
                    if db.is_zero():
                        continue
                    term = a.mul(db, op)
                    if coef != 1:
                        term = term.scale(coef)
                    key = tuple(pi - si + qi for pi, si, qi in zip(p, s, q))
                    out[key] = out[key] + term if key in out else term
        return SeriesDiffOp(self.rs, m, out)

    def conjugate(self, g: FormalSeries, ginv: FormalSeries) -> "SeriesDiffOp":
        """g o self o g^{-1} for scalar series g with declared inverse ginv."""
        out: dict = {}
        for p, c in self.terms.items():
            for s in _multi_range(p):
                coef = _mbinom(p, s)
                gd = g.mul(self._deriv_series(ginv, s), lambda x, y: x * y)
                # scalar factor series (lead 0) multiplies the coefficient series
                factor = FormalSeries(self.rs, (0,) * self.rs.rank, gd.m, gd.coeffs)
                if tuple(a + b for a, b in zip(g.lead, ginv.lead)) != (0,) * self.rs.rank:
                    raise ExponentMismatch("g and g^{-1} leading exponents must cancel")
                term = c.mul(factor, lambda x, y: x * y)
                if coef != 1:
                    term = term.scale(coef)
                key = tuple(pi - si for pi, si in zip(p, s))
                out[key] = out[key] + term if key in out else term
        return SeriesDiffOp(self.rs, min(self.m, g.m, ginv.m), out)

    def __repr__(self):
        return f"SeriesDiffOp(m={self.m}, orders={sorted(self.terms)})"


def commutator(a: SeriesDiffOp, b: SeriesDiffOp, op: Callable = amul) -> SeriesDiffOp:
    return a.compose(b, op) - b.compose(a, op)


def apply(op: SeriesDiffOp, s: FormalSeries, mult: Callable = amul) -> FormalSeries:
    return op.apply(s, mult)


def conjugate(op: SeriesDiffOp, g: FormalSeries, ginv: FormalSeries) -> SeriesDiffOp:
    return op.conjugate(g, ginv)


def laplacian(rs: RootSystem, m: int, unit=Fraction(1)) -> SeriesDiffOp:
    """Delta = sum_{ab} G^{-1}_{ab} d_{h_a} d_{h_b}."""
    gi = rs.gram_inverse
    parts = []
    for a in range(rs.rank):
        for b in range(rs.rank):
            if gi[a][b]:
                p = [0] * rs.rank
                p[a] += 1
                p[b] += 1
                parts.append((tuple(p), gi[a][b], unit))
    return SeriesDiffOp.from_parts(rs, m, parts)


def unit_vector(r: int, a: int) -> tuple:
    return tuple(int(i == a) for i in range(r))
