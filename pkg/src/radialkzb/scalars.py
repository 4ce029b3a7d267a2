"""Exact scalars: rationals (``fractions.Fraction``) and Gaussian rationals."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Union


class QI:
    """Gaussian rational ``re + im*i`` with Fraction parts.

    Mixes freely with ``int`` and ``Fraction``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _lift(x) -> "QI | None":
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Fraction)):
            return QI(x, 0)
        return None

    def __add__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("QI division by zero")
        return QI((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QI(1) / (self ** (-k))
        out, base = QI(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def __eq__(self, other):
        o = QI._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[int, Fraction, QI]

I = QI(0, 1)


def simplify(x):
    """Drop to Fraction when the imaginary part vanishes."""
    if isinstance(x, QI) and x.im == 0:
        return x.re
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x


def real_part(x) -> Fraction:
    """Real projection; raises if a nonzero imaginary part is present."""
    if isinstance(x, QI):
        if x.im != 0:
            raise ValueError(f"nonvanishing imaginary part in {x}")
        return x.re
    return Fraction(x)


def _frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Serialize as ``p/q``, ``p/q*i`` or ``a+b*i``."""
    if isinstance(x, QI):
        if x.im == 0:
            return _frac_str(x.re)
        im = _frac_str(x.im) + "*i"
        if x.re == 0:
            return im
        sign = "+" if x.im > 0 else ""
        return _frac_str(x.re) + sign + im
    if isinstance(x, (int, Rational)):
        return _frac_str(Fraction(x))
    raise TypeError(f"not an exact scalar: {x!r}")


_TERM = re.compile(r"([+-]?)([^+-]+)")


def parse_scalar(text: str):
    """Parse ``1/2``, ``-3``, ``i/3``, ``2/3*i``, ``-2i/7``, ``1+i/2``.

    Returns a Fraction, or a QI when an imaginary part is present.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    total = QI(0)
    pos = 0
    for mt in _TERM.finditer(s):
        if mt.start() != pos:
            raise ValueError(f"cannot parse scalar {text!r}")
        pos = mt.end()
        sign = -1 if mt.group(1) == "-" else 1
        body = mt.group(2)
        if "i" in body:
            try:
                if body == "i":
                    val = Fraction(1)
                elif body.startswith("i/"):
                    val = 1 / Fraction(body[2:])
                elif body.endswith("*i"):
                    val = Fraction(body[:-2])
                elif body.endswith("i"):
                    val = Fraction(body[:-1])
                elif "i/" in body:
                    num, den = body.split("i/", 1)
                    val = Fraction(num.rstrip("*")) / Fraction(den)
                else:
                    raise ValueError(body)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"cannot parse scalar {text!r}") from exc
            total = total + QI(0, sign * val)
        else:
            try:
                total = total + sign * Fraction(body)
            except ValueError as exc:
                raise ValueError(f"cannot parse scalar {text!r}") from exc
    if pos != len(s):
        raise ValueError(f"cannot parse scalar {text!r}")
    return simplify(total)


def is_zero(x) -> bool:
    """Exact zero test for scalars, numpy object arrays and algebra elements."""
    if hasattr(x, "is_zero"):
        return x.is_zero()
    if hasattr(x, "flat"):
        return all(c == 0 for c in x.flat)
    return x == 0
