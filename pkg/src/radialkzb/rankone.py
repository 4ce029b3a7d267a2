"""sl2 closed forms: Meixner-Pollaczek polynomials, Gauss series and the Poisson kernel.

Conventions here follow the sl2 identification lam -> lam(H) (``lam_c``) and
the variable x = a^{-2} = xi_{-alpha}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .scalars import I, QI, simplify


def pochhammer(a, n: int):
    out = Fraction(1)
    for k in range(n):
        out = out * (a + k)
    return out


@dataclass(frozen=True)
class MPPoly:
    """Monic Meixner-Pollaczek polynomial (phi = pi/2) as coefficients in s."""

    n: int
    lam: Fraction
    coeffs: tuple

    def __call__(self, s):
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * s + c
        return simplify(out)


def _poly_shift(p: list) -> list:
    return [Fraction(0)] + p


def _poly_axpy(a: list, b: list, c) -> list:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x + c * y for x, y in zip(a, b)]


def mp_poly(n: int, lam) -> MPPoly:
    """p_{k+1} = s p_k - k(k + 2 lam - 1)/4 p_{k-1}, p_0 = 1."""
    lam = Fraction(lam) if not isinstance(lam, QI) else lam
    prev, cur = [], [Fraction(1)]
    for k in range(n):
        nxt = _poly_axpy(_poly_shift(cur), prev, -(k * (k + 2 * lam - 1)) / Fraction(4))
        prev, cur = cur, nxt
    return MPPoly(n, lam, tuple(simplify(c) for c in cur))


def mp_value(n: int, lam, s):
    return mp_poly(n, lam)(s)


@dataclass
class GaussSeries:
    """Truncated 2F1(a, b; c | z) coefficients up to z^nmax."""

    a: object
    b: object
    c: object
    nmax: int
    coeffs: list = field(init=False)

    def __post_init__(self):
        out = [Fraction(1)]
        t = Fraction(1)
        for k in range(self.nmax):
            den = (self.c + k) * (k + 1)
            if den == 0:
                raise ZeroDivisionError("lower parameter is a nonpositive integer")
            t = t * (self.a + k) * (self.b + k) / den
            out.append(simplify(t))
        self.coeffs = out


def _binomial_series(expo, nmax: int, sign: int = 1) -> list:
    """Coefficients of (1 + sign x)^expo up to x^nmax."""
    out = [Fraction(1)]
    c = Fraction(1)
    for n in range(1, nmax + 1):
        c = c * (expo - n + 1) / n
        out.append(simplify(c * sign**n))
    return out


def _mul(a: list, b: list, nmax: int) -> list:
    out = [Fraction(0)] * (nmax + 1)
    for i, x in enumerate(a[: nmax + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: nmax + 1 - i]):
            out[i + j] = out[i + j] + x * y
    return [simplify(c) for c in out]


def hc_closed_form(lam_c, nu_l, nu_r, nmax: int) -> list:
    """Coefficients of x^n (x = a^{-2}) in a^{-lam} times the Gauss closed form.

    (1+x)^lam ((1-x)/(1+x))^{i(nu_l+nu_r)} 2F1(-lam/2+i nu_l, -lam/2+i nu_r; -lam | 4x/(1+x)^2)
    """
    lam_c = Fraction(lam_c)
    if lam_c >= 0 and lam_c.denominator == 1:
        raise ValueError("lam_c must avoid nonnegative integers")
    e = I * (nu_l + nu_r)
    pref = _mul(_binomial_series(lam_c, nmax), _binomial_series(e, nmax, -1), nmax)
    pref = _mul(pref, _binomial_series(-e, nmax), nmax)
    gs = GaussSeries(-lam_c / 2 + I * nu_l, -lam_c / 2 + I * nu_r, -lam_c, nmax)
    # z^k = 4^k x^k (1+x)^{-2k}
    tot = [Fraction(0)] * (nmax + 1)
    for k, ck in enumerate(gs.coeffs):
        if k > nmax:
            break
        zk = [Fraction(0)] * k + [c * 4**k for c in _binomial_series(-2 * k, nmax - k)]
        tot = [t + ck * z for t, z in zip(tot, zk)]
    return _mul(pref, tot, nmax)


def poisson_series(lam_c, nu_l, nu_r, nmax: int) -> list:
    """sum_n 4^n p_n(-nu_l) p_n(-nu_r) / ((-lam)_n n!) (-x)^n with parameter -lam/2."""
    lam_c = Fraction(lam_c)
    out = []
    for n in range(nmax + 1):
        pl = mp_value(n, -lam_c / 2, -nu_l)
        pr = mp_value(n, -lam_c / 2, -nu_r)
        out.append(simplify(Fraction(4) ** n * pl * pr / (pochhammer(-lam_c, n) * factorial(n)) * (-1) ** n))
    return out


@dataclass
class PoissonReport:
    passed: bool
    m: int
    mismatches: list


def verify_poisson(lam_c, nu_l, nu_r, m: int) -> PoissonReport:
    """Both sides up to x^m."""
    lhs = poisson_series(lam_c, nu_l, nu_r, m)
    rhs = hc_closed_form(lam_c, nu_l, nu_r, m)
    bad = [n for n in range(m + 1) if lhs[n] != rhs[n]]
    return PoissonReport(not bad, m, bad)
