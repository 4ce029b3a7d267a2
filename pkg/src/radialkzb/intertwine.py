"""k-intertwiners into and out of Verma modules, vertex operators and fusion.

All solves are exact and proceed depth by depth. A singular system means the
highest weight is not generic up to the requested depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import linalg
from .envalg import SplitLieAlgebra, UEAElement, _monomials
from .rootdata import WeightVec
from .verma import FinDimModule, VermaModule, _lead


class NonGenericWeight(ArithmeticError):
    def __init__(self, msg: str, gamma=None):
        super().__init__(msg)
        self.gamma = gamma


@dataclass
class KModule:
    """Finite-dimensional k-module given by the matrices of the Y[alpha] (alpha > 0)."""

    g: SplitLieAlgebra
    ymats: list
    label: str = ""

    @property
    def dim(self) -> int:
        return self.ymats[0].shape[0] if self.ymats else 1

    @classmethod
    def restriction(cls, U: FinDimModule, label: str = "") -> "KModule":
        g = U.g
        mats = [U.mats[g.e(a)] - U.mats[g.e(tuple(-c for c in a))] for a in g.k_roots]
        return cls(g, mats, label or f"res(dim {U.dim})")

    @classmethod
    def character(cls, g: SplitLieAlgebra, values) -> "KModule":
        """One-dimensional module with Y[alpha] acting by values[alpha index].

        ``values`` may be a single scalar in rank one. Y[alpha] is the hatted
        generator; in rank one it equals the Killing-normalized y.
        """
        if not isinstance(values, (list, tuple)):
            values = [values]
        if len(values) != len(g.k_roots):
            raise ValueError("one value per positive root required")
        mats = []
        for v in values:
            a = np.empty((1, 1), dtype=object)
            a[0, 0] = Fraction(v) if isinstance(v, int) else v
            mats.append(a)
        mod = cls(g, mats, "chi(" + ",".join(str(v) for v in values) + ")")
        if not mod.check_relations():
            raise ValueError("values do not define a character of k")
        return mod

    def dual(self) -> "KModule":
        return KModule(self.g, [-m.T for m in self.ymats], self.label + "*")

    def rep_mono(self, mono) -> np.ndarray:
        out = linalg.identity(self.dim)
        for i in mono:
            out = out @ self.ymats[i]
        return out

    def rep(self, x: UEAElement) -> np.ndarray:
        if x.alg is not self.g.Uk:
            x = self.g.g_to_k(x)
        out = linalg.zeros((self.dim, self.dim))
        for mono, c in x.terms.items():
            out = out + self.rep_mono(mono) * c
        return out

    def check_relations(self) -> bool:
        kb = self.g.k_bracket
        for i in range(len(self.ymats)):
            for j in range(len(self.ymats)):
                lhs = self.ymats[i] @ self.ymats[j] - self.ymats[j] @ self.ymats[i]
                rhs = linalg.zeros(lhs.shape)
                for k, c in kb[i][j].items():
                    rhs = rhs + self.ymats[k] * c
                if not linalg.is_zero_array(lhs - rhs):
                    return False
        return True


@dataclass
class GradedMap:
    """Weight-graded exact blocks of a truncated intertwiner.

    ``kind`` is ``from_verma`` (blocks gamma -> dim V x dim M[gamma]),
    ``to_verma`` (blocks gamma -> dim M[gamma] x dim V) or ``vertex``.
    """

    kind: str
    verma: VermaModule
    blocks: dict
    m: int
    meta: dict = field(default_factory=dict)

    def block(self, gamma) -> np.ndarray:
        return self.blocks[tuple(gamma)]


def _k_weighted_degree(g: SplitLieAlgebra, mono) -> int:
    return sum(sum(g.k_roots[i]) for i in mono)


def _y_action(V: VermaModule, i: int, vec: dict) -> dict:
    g = V.g
    a = g.k_roots[i]
    up = V.apply_gen(g.e(a), vec)
    dn = V.apply_gen(g.e(tuple(-c for c in a)), vec)
    out = dict(up)
    for k, v in dn.items():
        out[k] = out[k] - v if k in out else -v
    return out


class WordTable:
    """Expansion of each Verma basis vector as sum_Y c_Y Y m_lam over Y-monomials."""

    def __init__(self, V: VermaModule):
        self.V = V
        g = V.g
        m = V.m
        maxdeg = m
        monos = [mo for mo in _monomials(len(g.k_roots), maxdeg) if _k_weighted_degree(g, mo) <= m]
        monos.sort(key=lambda mo: (_k_weighted_degree(g, mo), mo))
        self.monos = monos
        pos = {mo: i for i, mo in enumerate(monos)}
        images: dict = {(): V.hw_vector()}
        for mo in monos:
            if mo in images:
                continue
            images[mo] = _y_action(V, mo[0], images[mo[1:]])
        self.images = images
        ny = len(monos)
        # expansion matrices per weight: (ny x dim M[gamma])
        self.coef = {}
        for d in range(m + 1):
            gams = [gm for gm in V.weights if -sum(gm) == d and V.dim(gm)]
            ys = [mo for mo in monos if _k_weighted_degree(g, mo) == d]
            rows = []
            offs = {}
            for gm in gams:
                offs[gm] = len(rows)
                rows += [(gm, i) for i in range(V.dim(gm))]
            if len(rows) != len(ys):
                raise AssertionError("word table is not square")
            if not rows:
                continue
            T = linalg.zeros((len(rows), len(ys)))
            for j, mo in enumerate(ys):
                img = images[mo]
                for gm in gams:
                    if gm in img:
                        T[offs[gm]:offs[gm] + V.dim(gm), j] = img[gm]
            Tinv = linalg.inverse(T, f"word table at depth {d}")
            # b = sum_Y a_{Y,b} (Y m) - sum_Y a_{Y,b} lower(Y m)
            for gm in gams:
                cm = linalg.zeros((ny, V.dim(gm)))
                a = Tinv[:, offs[gm]:offs[gm] + V.dim(gm)]
                for j, mo in enumerate(ys):
                    row = a[j]
                    if linalg.is_zero_array(row):
                        continue
                    cm[pos[mo]] = cm[pos[mo]] + row
                    for lg, lv in images[mo].items():
                        if -sum(lg) >= d:
                            continue
                        # lower part expansion: coef[lg] @ lv is the Y-expansion
                        low = self.coef[lg] @ lv
                        cm = cm - np.outer(low, row)
                self.coef[gm] = cm


@lru_cache(maxsize=64)
def _word_table(g: SplitLieAlgebra, lam: tuple, m: int) -> WordTable:
    return WordTable(VermaModule(g, lam, m))


def phi_left(g: SplitLieAlgebra, lam, Vl: KModule, v, m: int) -> GradedMap:
    """k-intertwiner phi: M_lam -> V_l with phi(m_lam) = v."""
    lam = _lead(g, lam)
    wt = _word_table(g, lam, m)
    v = np.asarray(v, dtype=object)
    cols = [Vl.rep_mono(mo) @ v for mo in wt.monos]
    S = np.array(cols, dtype=object).T if cols else linalg.zeros((Vl.dim, 0))
    blocks = {gm: S @ c for gm, c in wt.coef.items()}
    return GradedMap("from_verma", wt.V, blocks, m, {"v": v, "module": Vl.label})


def phi_left_all(g: SplitLieAlgebra, lam, Vl: KModule, m: int) -> dict:
    """Blocks for every basis vector v: gamma -> array (dim V, dim V(for v), dim M)."""
    out = {}
    for j in range(Vl.dim):
        v = linalg.zeros(Vl.dim)
        v[j] = Fraction(1)
        out[j] = phi_left(g, lam, Vl, v, m)
    return out


def phi_right(g: SplitLieAlgebra, lam, Vr: KModule, f, m: int) -> GradedMap:
    """k-intertwiner phi: V_r -> completed M_lam with highest weight component f."""
    lam = _lead(g, lam)
    V = VermaModule(g, lam, m)
    f = np.asarray(f, dtype=object).reshape(1, Vr.dim)
    z = (0,) * g.rank
    X = {z: f}
    for gm in V.weights:
        if gm == z or V.dim(gm) == 0:
            continue
        A_rows, B_rows = [], []
        for i, a in enumerate(g.k_roots):
            up = tuple(x + y for x, y in zip(gm, a))
            if any(x > 0 for x in up):
                continue
            E = V.gen_matrix(g.e(a), gm)
            rhs = X[up] @ Vr.ymats[i] if up in X else linalg.zeros((V.dim(up), Vr.dim))
            up2 = tuple(x + y for x, y in zip(up, a))
            if all(x <= 0 for x in up2) and up2 in X:
                rhs = rhs + V.gen_matrix(g.e(tuple(-c for c in a)), up2) @ X[up2]
            A_rows.append(E)
            B_rows.append(rhs)
        A = np.vstack(A_rows)
        B = np.vstack(B_rows)
        try:
            X[gm] = linalg.solve(A, B, f"at offset {gm}")
        except linalg.SingularSystem as exc:
            raise NonGenericWeight(f"highest weight not generic at offset {gm}", gm) from exc
        except linalg.InconsistentSystem as exc:
            raise NonGenericWeight(f"no intertwiner extends to offset {gm}", gm) from exc
    return GradedMap("to_verma", V, X, m, {"f": f, "module": Vr.label})


def chi_invariant_vector(g: SplitLieAlgebra, lam, chi: KModule, m: int) -> GradedMap:
    """chi-eigenvector in the completed Verma module via the Casimir recursion."""
    if chi.dim != 1:
        raise ValueError("character expected")
    lam = _lead(g, lam)
    rs = g.rs
    V = VermaModule(g, lam, m)
    z = (0,) * g.rank
    one = linalg.zeros((1, 1))
    one[0, 0] = Fraction(1)
    X = {z: one}
    for gm in V.weights:
        if gm == z or V.dim(gm) == 0:
            continue
        denom = rs.hc_obstruction(lam, gm)
        if denom == 0:
            raise NonGenericWeight(f"Casimir recursion breaks down at offset {gm}", gm)
        acc = linalg.zeros((V.dim(gm), 1))
        for i, a in enumerate(g.k_roots):
            na = g.n_of(a)
            fneg = g.e(tuple(-c for c in a))
            up = tuple(x + y for x, y in zip(gm, a))
            up2 = tuple(x + y for x, y in zip(up, a))
            if up2 in X:
                acc = acc + V.gen_matrix(fneg, up) @ (V.gen_matrix(fneg, up2) @ X[up2]) * (Fraction(1) / na)
            if up in X:
                acc = acc + V.gen_matrix(fneg, up) @ X[up] * (chi.ymats[i][0, 0] / na)
        X[gm] = acc * (Fraction(-2) / denom)
    return GradedMap("to_verma", V, X, m, {"module": chi.label})


# ---------------------------------------------------------------------------
# vertex operators


class VertexOperator:
    """Psi: M_lam -> M_mu (x) U, g-intertwiner with expectation value u."""

    def __init__(self, g: SplitLieAlgebra, lam, U: FinDimModule, u_index: int, m: int):
        self.g = g
        self.lam = _lead(g, lam)
        self.U = U
        self.u_index = u_index
        wt = U.weights[u_index]
        self.mu = tuple(a - b for a, b in zip(self.lam, wt))
        # depth reached by Psi(m_lam)
        spread = 0
        for w in U.weights:
            d = tuple(x - y for x, y in zip(w, wt))
            if all(x.denominator == 1 and x >= 0 for x in d):
                spread = max(spread, int(sum(d)))
        self.spread = spread
        self.m = m
        self.target = VermaModule(g, self.mu, m + spread)
        self.source = VermaModule(g, self.lam, m)
        self._solve_hw()
        self._cache: dict = {}

    def _solve_hw(self):
        g, U, M = self.g, self.U, self.target
        wt = U.weights[self.u_index]
        z = (0,) * g.rank
        X0 = linalg.zeros((1, U.dim))
        X0[0, self.u_index] = Fraction(1)
        X = {z: X0}
        simple = [g.e(a) for a in g.rs.simple_roots]
        Ut = [U.mats[i].T for i in simple]
        for gm in M.weights:
            if gm == z or -sum(gm) > self.spread:
                continue
            target_wt = tuple(a - b for a, b in zip(wt, gm))
            cols = U.weight_indices(target_wt)
            if not cols or M.dim(gm) == 0:
                continue
            A_rows, B_rows = [], []
            for i, ei in enumerate(simple):
                up = tuple(x + y for x, y in zip(gm, g.rs.simple_roots[i]))
                if any(x > 0 for x in up):
                    continue
                A_rows.append(M.gen_matrix(ei, gm))
                if up in X:
                    B_rows.append(-(X[up] @ Ut[i])[:, cols])
                else:
                    B_rows.append(linalg.zeros((M.dim(up), len(cols))))
            try:
                sol = linalg.solve(np.vstack(A_rows), np.vstack(B_rows), f"at offset {gm}")
            except linalg.SingularSystem as exc:
                raise NonGenericWeight(f"vertex operator not unique at offset {gm}", gm) from exc
            except linalg.InconsistentSystem as exc:
                raise NonGenericWeight(f"vertex operator does not exist at offset {gm}", gm) from exc
            full = linalg.zeros((M.dim(gm), U.dim))
            full[:, cols] = sol
            X[gm] = full
        self.hw_image = X

    def expectation(self) -> np.ndarray:
        z = (0,) * self.g.rank
        return self.hw_image[z][0]

    def _act(self, i: int, vec: dict) -> dict:
        """Diagonal action of basis symbol i on M_mu (x) U vectors {gamma: dimM x dimU}."""
        M, U = self.target, self.U
        out: dict = {}
        for gm, X in vec.items():
            tgt = M.target(i, gm)
            if all(x <= 0 for x in tgt):
                w = M.gen_matrix(i, gm) @ X
                out[tgt] = out[tgt] + w if tgt in out else w
            w2 = X @ U.mats[i].T
            out[gm] = out[gm] + w2 if gm in out else w2
        return out

    def image(self, gamma, b: int) -> dict:
        """Psi(basis vector b of M_lam[lam+gamma])."""
        key = (tuple(gamma), b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        mono = self.source.basis[tuple(gamma)][b]
        if not mono:
            res = self.hw_image
        else:
            # f-monomial = f_first * rest, rest is again a PBW f-monomial
            rest = mono[1:]
            rest_gamma = tuple(x - y for x, y in zip(gamma, self.g.weight_of(mono[0])))
            rb = self.source.index[rest_gamma][rest]
            res = self._act(mono[0], self.image(rest_gamma, rb))
        self._cache[key] = res
        return res

    def apply(self, vec: dict, wdim: int = 1) -> dict:
        """(Psi (x) id_W) on {gamma: dim M_lam[gamma] x dim W}; result rows M_mu, cols U (x) W."""
        out: dict = {}
        for gm, X in vec.items():
            for b in range(X.shape[0]):
                row = X[b]
                if linalg.is_zero_array(row):
                    continue
                for tg, Y in self.image(gm, b).items():
                    blk = np.multiply.outer(Y, row).reshape(Y.shape[0], Y.shape[1] * wdim)
                    out[tg] = out[tg] + blk if tg in out else blk
        return out


def vertex_operator(g: SplitLieAlgebra, lam, U: FinDimModule, u_index: int, m: int) -> VertexOperator:
    return VertexOperator(g, lam, U, u_index, m)


def compose_vertex(g: SplitLieAlgebra, lam, Us: Sequence[FinDimModule], u_idx: Sequence[int], m: int,
                   start: dict | None = None) -> tuple[dict, tuple, list]:
    """Apply Psi_N, then Psi_{N-1} (x) id, ..., starting from ``start`` (default m_lam).

    ``start`` maps gamma -> (dim M_lam[gamma] x 1) and may reach depth m.
    Returns (vector in M_{lam_0} (x) U_1 (x) ... (x) U_N, lam_0, list of operators).
    """
    lam = _lead(g, lam)
    z = (0,) * g.rank
    if start is None:
        one = linalg.zeros((1, 1))
        one[0, 0] = Fraction(1)
        start = {z: one}
    vec = start
    wdim = 1
    depth = m
    cur = lam
    ops = []
    for U, ui in reversed(list(zip(Us, u_idx))):
        op = VertexOperator(g, cur, U, ui, depth)
        vec = op.apply(vec, wdim)
        wdim *= U.dim
        depth = depth + op.spread
        cur = op.mu
        ops.append(op)
    return vec, cur, ops


def _tensor_weights(Us: Sequence[FinDimModule]) -> list:
    ws = [()]
    out = [tuple()]
    for U in Us:
        out = [w + (i,) for w in out for i in range(U.dim)]
    return out


def _sum_weight(Us, idx) -> tuple:
    r = Us[0].g.rank
    s = [Fraction(0)] * r
    for U, i in zip(Us, idx):
        s = [a + b for a, b in zip(s, U.weights[i])]
    return tuple(s)


def fusion(g: SplitLieAlgebra, lam, Us: Sequence[FinDimModule], u_idx: Sequence[int], m: int = 0) -> np.ndarray:
    """J(lam)(u_1 (x) ... (x) u_N) as a vector in U_1 (x) ... (x) U_N."""
    vec, _, _ = compose_vertex(g, lam, Us, u_idx, m)
    z = (0,) * g.rank
    return vec[z][0] if z in vec else linalg.zeros(int(np.prod([U.dim for U in Us])))


def fusion_matrix(g: SplitLieAlgebra, lam, Us: Sequence[FinDimModule]) -> np.ndarray:
    idxs = _tensor_weights(Us)
    n = len(idxs)
    J = linalg.zeros((n, n))
    for c, idx in enumerate(idxs):
        J[:, c] = fusion(g, lam, Us, idx)
    return J


def boundary_fusion(g: SplitLieAlgebra, lam, Vl: KModule, Us: Sequence[FinDimModule]) -> np.ndarray:
    """J_l(lam) on V_l (x) U_1 (x) ... (x) U_N (row-major: V_l index major)."""
    lam = _lead(g, lam)
    idxs = _tensor_weights(Us)
    nU = len(idxs)
    n = Vl.dim * nU
    J = linalg.zeros((n, n))
    for c, idx in enumerate(idxs):
        vec, lam0, ops = compose_vertex(g, lam, Us, idx, 0)
        depth = max((-sum(gm) for gm in vec), default=0)
        for vj in range(Vl.dim):
            v = linalg.zeros(Vl.dim)
            v[vj] = Fraction(1)
            phi = phi_left(g, lam0, Vl, v, depth)
            res = linalg.zeros((Vl.dim, nU))
            for gm, X in vec.items():
                res = res + phi.blocks[gm] @ X
            J[:, vj * nU + c] = res.reshape(-1)
    return J


def u_weight_of_index(Vl: KModule, Us: Sequence[FinDimModule]) -> list:
    """Total U-weight attached to each basis index of V_l (x) U."""
    idxs = _tensor_weights(Us)
    out = []
    for _ in range(Vl.dim):
        for idx in idxs:
            out.append(_sum_weight(Us, idx))
    return out


def normalized_boundary_fusion(g: SplitLieAlgebra, lam, Vl: KModule, Us: Sequence[FinDimModule]) -> np.ndarray:
    """J_l(lam) (id (x) J(lam)^{-1}) on V_l (x) U."""
    Jl = boundary_fusion(g, lam, Vl, Us)
    J = fusion_matrix(g, lam, Us)
    Jinv = linalg.solve(J, linalg.identity(J.shape[0]))
    return Jl @ np.kron(linalg.identity(Vl.dim), Jinv)


def is_weight_unitriangular(M: np.ndarray, weights: Sequence[tuple]) -> bool:
    """Ones on the diagonal; an off-diagonal entry (i, j) only if wt_i - wt_j is a nonzero sum of positive roots."""
    n = M.shape[0]
    for i in range(n):
        for j in range(n):
            c = M[i, j]
            if i == j:
                if c != 1:
                    return False
                continue
            if c == 0:
                continue
            diff = [a - b for a, b in zip(weights[i], weights[j])]
            if not any(diff) or any(d < 0 for d in diff):
                return False
    return True
