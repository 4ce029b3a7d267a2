"""Exact Gaussian elimination over any Python field (Fraction, QI)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


class SingularSystem(ArithmeticError):
    """Coefficient matrix has a nontrivial kernel."""


class InconsistentSystem(ArithmeticError):
    """Right-hand side is not in the column span."""


def zeros(shape) -> np.ndarray:
    a = np.empty(shape, dtype=object)
    a.fill(Fraction(0))
    return a


def identity(n: int) -> np.ndarray:
    a = zeros((n, n))
    for i in range(n):
        a[i, i] = Fraction(1)
    return a


def as_exact(rows) -> np.ndarray:
    """Object array with every entry exact (ints promoted to Fraction)."""
    a = np.array(rows, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = Fraction(v) if isinstance(v, int) else v
    return out


def is_zero_array(a) -> bool:
    return all(c == 0 for c in np.asarray(a, dtype=object).flat)


def _row_reduce(m: list[list], ncols: int):
    """In-place reduced row echelon form on the first ``ncols`` columns.

    Returns the pivot column list.
    """
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        p = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        row = m[r]
        if piv != 1:
            inv = 1 / piv
            for j in range(c, len(row)):
                if row[j] != 0:
                    row[j] = row[j] * inv
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    mi = m[i]
                    for j in range(c, len(row)):
                        if row[j] != 0:
                            mi[j] = mi[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rref(a) -> tuple[np.ndarray, list[int]]:
    a = np.asarray(a, dtype=object)
    m = [list(row) for row in a]
    piv = _row_reduce(m, a.shape[1])
    return as_exact(m) if m else a.copy(), piv


def rank(a) -> int:
    a = np.asarray(a, dtype=object)
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def solve(a, b, context: str = "") -> np.ndarray:
    """Unique solution X of A X = B (B may be a vector or a matrix).

    Raises SingularSystem when A has a kernel and InconsistentSystem when
    some column of B is outside the column span of A.
    """
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    n, k = a.shape
    if b.shape[0] != n:
        raise ValueError("shape mismatch in solve")
    if k == 0:
        if not is_zero_array(b):
            raise InconsistentSystem(f"no unknowns but nonzero right side {context}")
        out = zeros((0, b.shape[1]))
        return out.reshape(0) if vec else out
    m = [list(a[i]) + list(b[i]) for i in range(n)]
    piv = _row_reduce(m, k)
    if len(piv) < k:
        raise SingularSystem(f"rank {len(piv)} < {k} unknowns {context}")
    for i in range(len(piv), n):
        if any(v != 0 for v in m[i][k:]):
            raise InconsistentSystem(f"inconsistent system {context}")
    x = zeros((k, b.shape[1]))
    for r, c in enumerate(piv):
        for j in range(b.shape[1]):
            x[c, j] = m[r][k + j]
    return x.reshape(k) if vec else x


def inverse(a, context: str = "") -> np.ndarray:
    a = np.asarray(a, dtype=object)
    return solve(a, identity(a.shape[0]), context)


def nullspace(a) -> list[np.ndarray]:
    """Basis of the right kernel."""
    a = np.asarray(a, dtype=object)
    n, k = a.shape
    m = [list(row) for row in a]
    piv = _row_reduce(m, k) if n else []
    free = [c for c in range(k) if c not in piv]
    basis = []
    for f in free:
        v = zeros(k)
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -m[r][f]
        basis.append(v)
    return basis


def det(a):
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    m = [list(row) for row in a]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d = d * m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] * inv
            if f != 0:
                for j in range(c, n):
                    m[i][j] = m[i][j] - f * m[c][j]
    return d


def kron_all(mats) -> np.ndarray:
    out = None
    for mat in mats:
        out = mat if out is None else np.kron(out, mat)
    return out
