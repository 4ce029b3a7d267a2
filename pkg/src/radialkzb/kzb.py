"""Dynamical r- and k-matrices, N-point spherical functions and boundary KZB operators.

Tensors with torus-function coefficients are stored as ``TensorElement`` objects
whose coefficients are ``RFunc`` values. Legs are either U(g) (symbols in the
hatted Chevalley basis) or U(k) (symbols Y[alpha], alpha > 0). The Killing
normalized root vectors never appear on their own: every tensor is quadratic in
them, so a pair e_a (x) e_b with a + b = 0 turns into E[a] (x) E[b] / n_a.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import fseries, linalg
from .envalg import SplitLieAlgebra, TensorElement, UEAElement
from .fseries import FormalSeries, SeriesDiffOp, amul
from .hcm import Report, eigenvalue, formal_spherical
from .intertwine import KModule, VertexOperator, boundary_fusion, phi_left, phi_right
from .radial import TorusPoint
from .rfunc import RFunc, coth, inv_one_minus, inv_sinh, inv_sinh2
from .verma import FinDimModule, _lead


# ---------------------------------------------------------------------------
# dynamical tensors


@dataclass
class DynTensor:
    """Element of R (x) (legs); ``kinds`` holds 'g' or 'k' per leg."""

    g: SplitLieAlgebra
    kinds: tuple
    tensor: TensorElement
    name: str = ""

    @classmethod
    def zero(cls, g: SplitLieAlgebra, kinds: Sequence[str], name: str = "") -> "DynTensor":
        return cls(g, tuple(kinds), TensorElement(_algs(g, kinds)), name)

    @property
    def algs(self) -> tuple:
        return self.tensor.algs

    def _wrap(self, t: TensorElement, name: str = "") -> "DynTensor":
        return DynTensor(self.g, self.kinds, t, name)

    def __add__(self, other: "DynTensor") -> "DynTensor":
        return self._wrap(self.tensor + other.tensor)

    def __sub__(self, other: "DynTensor") -> "DynTensor":
        return self._wrap(self.tensor - other.tensor)

    def __neg__(self) -> "DynTensor":
        return self._wrap(-self.tensor, self.name)

    def scale(self, c) -> "DynTensor":
        return self._wrap(self.tensor * c)

    def __mul__(self, other: "DynTensor") -> "DynTensor":
        return self._wrap(self.tensor * other.tensor)

    def is_zero(self) -> bool:
        return self.tensor.is_zero()

    def __eq__(self, other):
        if not isinstance(other, DynTensor):
            return NotImplemented
        return self.kinds == other.kinds and (self.tensor - other.tensor).is_zero()

    __hash__ = None

    def embed(self, kinds: Sequence[str], legs: Sequence[int]) -> "DynTensor":
        kinds = tuple(kinds)
        for i, leg in enumerate(legs):
            if kinds[leg] != self.kinds[i]:
                raise ValueError(f"leg {i} of kind {self.kinds[i]} cannot go to a {kinds[leg]} leg")
        return DynTensor(self.g, kinds, self.tensor.embed(_algs(self.g, kinds), legs), self.name)

    def swap(self) -> "DynTensor":
        """s_21 for a two-leg tensor."""
        t = self.tensor.permute([1, 0])
        return DynTensor(self.g, (self.kinds[1], self.kinds[0]), t, self.name + "_21")

    def theta_leg(self, leg: int) -> "DynTensor":
        """Apply the Chevalley involution to one U(g) leg."""
        if self.kinds[leg] != "g":
            raise ValueError("theta acts on U(g) legs")
        out = TensorElement(self.algs)
        for key, c in self.tensor.terms.items():
            img = self.g.theta(UEAElement(self.g.U, {key[leg]: Fraction(1)}))
            for mono, v in img.terms.items():
                k2 = key[:leg] + (mono,) + key[leg + 1:]
                out = out + TensorElement(self.algs, {k2: c * v})
        return self._wrap(out)

    def multiply(self) -> "DynTensor":
        """m(a (x) b) = ab for a two-leg U(g) tensor."""
        if self.kinds != ("g", "g"):
            raise ValueError("multiplication map needs two U(g) legs")
        return DynTensor(self.g, ("g",), self.tensor.contract(0, 1), "m(" + self.name + ")")

    def ad_torus(self, leg: int, sign: int = -1) -> "DynTensor":
        """Ad_{a^sign} on one U(g) leg: E[b] -> xi_{sign b} E[b]."""
        g = self.g
        out = {}
        for key, c in self.tensor.terms.items():
            wt = [0] * g.rank
            for s in key[leg]:
                wt = [x + y for x, y in zip(wt, g.weight_of(s))]
            out[key] = c * RFunc.xi(g.rs, tuple(sign * x for x in wt))
        return self._wrap(TensorElement(self.algs, out))

    def derivative(self, hvec) -> "DynTensor":
        return self._wrap(self.tensor.map_coeffs(lambda f: _as_rfunc(self.g, f).derivative(hvec)))

    def evaluate(self, a: TorusPoint) -> TensorElement:
        return self.tensor.map_coeffs(lambda f: _as_rfunc(self.g, f).evaluate(a.t))

    def expand(self, m: int) -> dict:
        """{gamma: scalar TensorElement} with ht(-gamma) <= m."""
        out: dict = {}
        for key, f in self.tensor.terms.items():
            for gm, c in _as_rfunc(self.g, f).expand(m).items():
                out.setdefault(gm, {})[key] = c
        return {gm: TensorElement(self.algs, t) for gm, t in out.items() if t}

    def leg_elements(self, leg: int) -> dict:
        """Group by the other legs: {rest key: {symbol: coefficient}} for a degree-one leg."""
        out: dict = {}
        for key, c in self.tensor.terms.items():
            mono = key[leg]
            if len(mono) != 1:
                raise ValueError("leg is not of degree one")
            rest = key[:leg] + key[leg + 1:]
            d = out.setdefault(rest, {})
            d[mono[0]] = d[mono[0]] + c if mono[0] in d else c
        return out

    def leg_in(self, leg: int, space: str) -> bool:
        """Check that every slice of a degree-one U(g) leg lies in k, p or h."""
        g = self.g
        if self.kinds[leg] == "k":
            return space == "k"
        for d in self.leg_elements(leg).values():
            zero = RFunc(g.rs, {})
            for i, c in d.items():
                a = g.basis_roots[i]
                if a is None:
                    if space == "k" and not _as_rfunc(g, c).is_zero():
                        return False
                    continue
                if space == "h":
                    return False
                partner = d.get(g.e(tuple(-x for x in a)), zero)
                want = -_as_rfunc(g, c) if space == "k" else _as_rfunc(g, c)
                if not (_as_rfunc(g, partner) - want).is_zero():
                    return False
        return True

    def __repr__(self):
        return f"DynTensor({self.name or '?'}, legs={''.join(self.kinds)}, terms={len(self.tensor.terms)})"


def _algs(g: SplitLieAlgebra, kinds: Sequence[str]) -> list:
    return [g.U if k == "g" else g.Uk for k in kinds]


def _as_rfunc(g: SplitLieAlgebra, f) -> RFunc:
    return f if isinstance(f, RFunc) else RFunc.const(g.rs, f)


def _term(g, kinds, monos, coeff) -> TensorElement:
    return TensorElement(_algs(g, kinds), {tuple(monos): coeff})


def _neg(a) -> tuple:
    return tuple(-c for c in a)


def _y_k(g: SplitLieAlgebra, alpha) -> tuple:
    """(Y index, sign) with y_alpha = sign * Y[|alpha|]."""
    alpha = tuple(alpha)
    if alpha in g.rs.positive_roots:
        return g.y(alpha), Fraction(1)
    return g.y(_neg(alpha)), Fraction(-1)


def _y_g(g: SplitLieAlgebra, alpha) -> dict:
    """y_alpha = E[alpha] - E[-alpha] as {symbol: coeff} (hatted)."""
    return {g.e(alpha): Fraction(1), g.e(_neg(alpha)): Fraction(-1)}


def cartan_tensor(g: SplitLieAlgebra, coeff=Fraction(1)) -> TensorElement:
    """coeff * sum_j x_j (x) x_j via the inverse Gram matrix."""
    gi = g.rs.gram_inverse
    out = {}
    for a in range(g.rank):
        for b in range(g.rank):
            if gi[a][b]:
                out[((g.h(a),), (g.h(b),))] = RFunc.const(g.rs, gi[a][b] * coeff)
    return TensorElement([g.U, g.U], out)


def cartan_square(g: SplitLieAlgebra, coeff=Fraction(1)) -> TensorElement:
    """coeff * sum_j x_j^2 in a single U(g) leg."""
    return cartan_tensor(g, coeff).contract(0, 1)


def felder_r(g: SplitLieAlgebra) -> DynTensor:
    """-1/2 sum x_j (x) x_j - sum_R e_{-a} (x) e_a / (1 - xi_{-2a})."""
    rs = g.rs
    t = cartan_tensor(g, Fraction(-1, 2))
    for a in rs.roots:
        f = inv_one_minus(rs, a) * (Fraction(-1) / g.n_of(a))
        t = t + _term(g, "gg", [(g.e(_neg(a)),), (g.e(a),)], f)
    return DynTensor(g, ("g", "g"), t, "r")


def r_theta1(g: SplitLieAlgebra) -> DynTensor:
    """(theta (x) id) r written out: 1/2 sum x (x) x + sum_R e_a (x) e_a / (1 - xi_{-2a})."""
    rs = g.rs
    t = cartan_tensor(g, Fraction(1, 2))
    for a in rs.roots:
        f = inv_one_minus(rs, a) * (Fraction(1) / g.n_of(a))
        t = t + _term(g, "gg", [(g.e(a),), (g.e(a),)], f)
    return DynTensor(g, ("g", "g"), t, "r^theta1")


def folded_r(g: SplitLieAlgebra, sign: int) -> DynTensor:
    """Closed forms of r^+ (k (x) g) and r^- (p (x) g)."""
    rs = g.rs
    if sign > 0:
        t = TensorElement([g.U, g.U])
        for a in rs.roots:
            f = inv_one_minus(rs, a) * (Fraction(1) / g.n_of(a))
            for s, c in _y_g(g, a).items():
                t = t + _term(g, "gg", [(s,), (g.e(a),)], f * c)
        return DynTensor(g, ("g", "g"), t, "r+")
    t = cartan_tensor(g)
    for a in rs.roots:
        f = inv_one_minus(rs, a) * (Fraction(1) / g.n_of(a))
        for s in (g.e(a), g.e(_neg(a))):
            t = t + _term(g, "gg", [(s,), (g.e(a),)], f)
    return DynTensor(g, ("g", "g"), t, "r-")


def folded_from_r(g: SplitLieAlgebra, sign: int) -> DynTensor:
    """sign * r + r_21^{theta_2} built from Felder's r."""
    r = felder_r(g)
    tw = r.swap().theta_leg(1)
    out = tw + r if sign > 0 else tw - r
    out.name = "r+" if sign > 0 else "r-"
    return out


def r_tilde_plus(g: SplitLieAlgebra, k_leg: bool = False) -> DynTensor:
    """sum_R e_a (x) y_a / (xi_a - xi_{-a}); second leg in U(k) when k_leg."""
    rs = g.rs
    kinds = ("g", "k") if k_leg else ("g", "g")
    t = TensorElement(_algs(g, kinds))
    for a in rs.roots:
        f = inv_sinh(rs, a) * (Fraction(1) / g.n_of(a))
        if k_leg:
            j, s = _y_k(g, a)
            t = t + _term(g, kinds, [(g.e(a),), (j,)], f * s)
        else:
            for sym, c in _y_g(g, a).items():
                t = t + _term(g, kinds, [(g.e(a),), (sym,)], f * c)
    return DynTensor(g, kinds, t, "r~+")


def kappa_core(g: SplitLieAlgebra) -> DynTensor:
    """1/2 sum x_j^2 + sum_R e_a^2 / (1 - xi_{-2a})."""
    rs = g.rs
    t = cartan_square(g, Fraction(1, 2))
    for a in rs.roots:
        f = inv_one_minus(rs, a) * (Fraction(1) / g.n_of(a))
        t = t + TensorElement([g.U], {((g.e(a), g.e(a)),): f})
    return DynTensor(g, ("g",), t, "kappa_core")


def d_term(g: SplitLieAlgebra) -> DynTensor:
    """-1/2 sum_{a>0} coth(a) t_a."""
    rs = g.rs
    t = TensorElement([g.U])
    for a in rs.positive_roots:
        f = coth(rs, a) * Fraction(-1, 2)
        for b, c in enumerate(rs.t_coords(a)):
            if c:
                t = t + TensorElement([g.U], {((g.h(b),),): f * c})
    return DynTensor(g, ("g",), t, "d")


def b_term(g: SplitLieAlgebra) -> DynTensor:
    out = kappa_core(g) + d_term(g)
    out.name = "b"
    return out


def kappa(g: SplitLieAlgebra) -> DynTensor:
    """sum_R y_a (x) e_a (x) 1/(1 - xi_{-2a}) + 1 (x) kappa_core (x) 1 + sum_R 1 (x) e_a (x) y_a/(xi_a - xi_{-a})."""
    rs = g.rs
    kinds = ("k", "g", "k")
    t = kappa_core(g).embed(kinds, [1]).tensor
    for a in rs.roots:
        j, s = _y_k(g, a)
        f = inv_one_minus(rs, a) * (s / g.n_of(a))
        t = t + _term(g, kinds, [(j,), (g.e(a),), ()], f)
        f2 = inv_sinh(rs, a) * (s / g.n_of(a))
        t = t + _term(g, kinds, [(), (g.e(a),), (j,)], f2)
    return DynTensor(g, kinds, t, "kappa")


def kappa_alternative(g: SplitLieAlgebra) -> DynTensor:
    """r^+ (x) 1 + 1 (x) kappa_core (x) 1 + 1 (x) (Ad_{a^{-1}} (x) id) r^+_21, k legs in U(k)."""
    kinds = ("k", "g", "k")
    rp = _to_k_leg(folded_r(g, 1), 0)
    tw = _to_k_leg(folded_r(g, 1).swap().ad_torus(0, -1), 1)
    out = rp.embed(kinds, [0, 1]) + kappa_core(g).embed(kinds, [1]) + tw.embed(kinds, [1, 2])
    out.name = "kappa(alt)"
    return out


def _to_k_leg(T: DynTensor, leg: int) -> DynTensor:
    """Rewrite a degree-one U(g) leg lying in k in the Y basis of U(k)."""
    g = T.g
    kinds = list(T.kinds)
    kinds[leg] = "k"
    out = TensorElement(_algs(g, kinds))
    for key, c in T.tensor.terms.items():
        i = key[leg][0]
        a = g.basis_roots[i]
        if a is None:
            raise ValueError("Cartan symbol in a k leg")
        if a in g.rs.positive_roots:
            k2 = key[:leg] + ((g.y(a),),) + key[leg + 1:]
            out = out + TensorElement(out.algs, {k2: c})
    conv = DynTensor(g, tuple(kinds), out, T.name)
    # the E[-a] parts must be exactly the negatives of the E[a] parts
    if not (_from_k_leg(conv, leg) - T).is_zero():
        raise ValueError("leg does not lie in k")
    return conv


def _from_k_leg(T: DynTensor, leg: int) -> DynTensor:
    g = T.g
    kinds = list(T.kinds)
    kinds[leg] = "g"
    out = TensorElement(_algs(g, kinds))
    for key, c in T.tensor.terms.items():
        img = g.k_to_g(UEAElement(g.Uk, {key[leg]: Fraction(1)}))
        for mono, v in img.terms.items():
            k2 = key[:leg] + (mono,) + key[leg + 1:]
            out = out + TensorElement(out.algs, {k2: c * v})
    return DynTensor(g, tuple(kinds), out, T.name)


# ---------------------------------------------------------------------------
# bridge identities and algebraic checks


def _rfunc_support(T: DynTensor) -> list:
    return sorted(str(k) for k in T.tensor.terms)


def verify_relations(g: SplitLieAlgebra) -> Report:
    """r^{theta1} symmetric, r^pm = pm r + r_21^{theta2}, kappa_core = m(r_21^{theta2}), b = d + m(r^{theta1})."""
    r = felder_r(g)
    rt = r_theta1(g)
    checks = {
        "theta1_closed_form": r.theta_leg(0) == rt,
        "theta_symmetric": r.swap().theta_leg(1) == rt,
        "r_plus": folded_from_r(g, 1) == folded_r(g, 1),
        "r_minus": folded_from_r(g, -1) == folded_r(g, -1),
        "kappa_core": r.swap().theta_leg(1).multiply() == kappa_core(g),
        "b_bridge": d_term(g) + rt.multiply() == b_term(g),
        "kappa_alternative": kappa_alternative(g) == kappa(g),
        "r_plus_in_k": folded_r(g, 1).leg_in(0, "k"),
        "r_minus_in_p": folded_r(g, -1).leg_in(0, "p"),
        "r_tilde_in_k": r_tilde_plus(g).leg_in(1, "k"),
    }
    return Report("relations", all(checks.values()), 0, checks, sorted(k for k, v in checks.items() if not v))


def classical_limit(T: DynTensor) -> TensorElement:
    """Value at a -> infinity: the height-zero coefficient of the expansion."""
    ex = T.expand(0)
    return ex.get((0,) * T.g.rank, TensorElement(T.algs))


# ---------------------------------------------------------------------------
# factorisations of the Casimir element on vertex operators


def _antipode_matrix(U: FinDimModule, mono) -> np.ndarray:
    """Matrix of S(x_1 ... x_k) = (-1)^k x_k ... x_1 on U."""
    out = linalg.identity(U.dim)
    for i in reversed(mono):
        out = out @ U.mats[i]
    return out * Fraction((-1) ** len(mono))


def _accumulate(acc: dict, f, vec: dict):
    for nu, X in vec.items():
        for idx, v in np.ndenumerate(X):
            if v != 0:
                key = (nu,) + idx
                acc[key] = acc[key] + f * v if key in acc else f * v


def _act_target(psi: VertexOperator, mono, vec: dict) -> dict:
    return psi.target.apply_mono(mono, vec)


def _act_u(U: FinDimModule, mat: np.ndarray, vec: dict) -> dict:
    return {nu: X @ mat.T for nu, X in vec.items()}


def _psi_of(psi: VertexOperator, vec: dict) -> dict:
    """Psi applied to a vector {gamma: 1-d array} of the source Verma module."""
    return psi.apply({gm: v.reshape(-1, 1) for gm, v in vec.items()}, 1)


def factorization_residual(psi: VertexOperator, tau_l: DynTensor, tau_r: DynTensor, d: DynTensor | None,
                           m: int, lhs: bool = True) -> dict:
    """tau_l Psi - Psi * tau_r + (1 (x) d) Psi - 1/2(Omega Psi - Psi Omega) on source depth <= m.

    Returns the nonzero entries {(source key, target gamma, row, col): RFunc}.
    """
    g = psi.g
    rs = g.rs
    U = psi.U
    src = psi.source
    zl = eigenvalue(rs, psi.lam)
    zm = eigenvalue(rs, psi.mu)
    half = (zm - zl) / 2
    out: dict = {}
    for gm in src.weights:
        if -sum(gm) > m:
            continue
        for b, mono in enumerate(src.basis[gm]):
            acc: dict = {}
            base = psi.image(gm, b)
            for (A, B), f in tau_l.tensor.terms.items():
                vec = _act_u(U, U.rep_mono(B), _act_target(psi, A, base))
                _accumulate(acc, f, vec)
            for (A, B), f in tau_r.tensor.terms.items():
                moved = src.apply_mono(B, src.basis_vector(gm, mono))
                vec = _act_u(U, _antipode_matrix(U, A), _psi_of(psi, moved))
                _accumulate(acc, -f, vec)
            if d is not None:
                for (A,), f in d.tensor.terms.items():
                    _accumulate(acc, f, _act_u(U, U.rep_mono(A), base))
            if lhs:
                _accumulate(acc, -half, base)
            for key, v in acc.items():
                if not _is_zero(v):
                    out[(gm, b) + key] = v
    return out


def _is_zero(v) -> bool:
    return v.is_zero() if isinstance(v, RFunc) else v == 0


def factorization_triple(g: SplitLieAlgebra, which: str) -> tuple:
    if which == "a":
        r = felder_r(g)
        return r, r, d_term(g)
    if which == "b":
        return folded_r(g, 1), -folded_r(g, -1), b_term(g)
    raise ValueError("factorisation must be 'a' or 'b'")


def verify_factorization(g: SplitLieAlgebra, which: str, lam, U: FinDimModule, u_index: int, m: int,
                         drop_d: bool = False) -> Report:
    """Both sides of the factorised Casimir identity on a truncated vertex operator."""
    lam = _lead(g, lam)
    extra = max(sum(a) for a in g.rs.positive_roots)
    psi = VertexOperator(g, lam, U, u_index, m + extra)
    tl, tr, d = factorization_triple(g, which)
    res = factorization_residual(psi, tl, tr, None if drop_d else d, m)
    name = f"factorization_{which}" + ("_without_d" if drop_d else "")
    support = sorted({k[0] for k in res})
    return Report(name, not res, m, {"entries": len(res)}, support)


def verify_twisted_commutation(g: SplitLieAlgebra, lam, U: FinDimModule, u_index: int, m: int) -> Report:
    """-r^{theta1} Psi - Psi * r^{theta1} = (1 (x) m(r^{theta1})) Psi."""
    lam = _lead(g, lam)
    extra = max(sum(a) for a in g.rs.positive_roots)
    psi = VertexOperator(g, lam, U, u_index, m + extra)
    rt = r_theta1(g)
    res = factorization_residual(psi, rt, -rt, rt.multiply(), m, lhs=False)
    return Report("twisted_commutation", not res, m, {"entries": len(res)}, sorted({k[0] for k in res}))


# ---------------------------------------------------------------------------
# mixed classical dynamical Yang-Baxter and reflection equations


def dynamical_derivative(T: DynTensor, leg: int) -> DynTensor:
    """sum_k (x_k)_leg d_{x_k} T with x_k on the left, via the inverse Gram matrix."""
    g = T.g
    gi = g.rs.gram_inverse
    out = DynTensor.zero(g, T.kinds)
    for b in range(g.rank):
        hvec = [Fraction(int(i == b)) for i in range(g.rank)]
        dT = T.derivative(hvec)
        if dT.is_zero():
            continue
        for a in range(g.rank):
            if not gi[a][b]:
                continue
            key = tuple((g.h(a),) if l == leg else () for l in range(len(T.kinds)))
            h = DynTensor(g, T.kinds, TensorElement(T.algs, {key: RFunc.const(g.rs, gi[a][b])}))
            out = out + h * dT
    return out


def _comm(a: DynTensor, b: DynTensor) -> DynTensor:
    return a * b - b * a


def cdybe_residuals(rp: DynTensor, rm: DynTensor) -> list:
    """Left minus right side of the three mixed dynamical Yang-Baxter equations."""
    K = ("g", "g", "g")
    p12, p13, p23 = (rp.embed(K, l) for l in ([0, 1], [0, 2], [1, 2]))
    m12, m13, m23 = (rm.embed(K, l) for l in ([0, 1], [0, 2], [1, 2]))
    d = dynamical_derivative
    one = d(m23, 0) - d(m13, 1) - (_comm(m13, p12) + _comm(m12, m23) + _comm(m13, m23))
    two = d(p23, 0) - d(m12, 2) - (_comm(m12, p13) + _comm(m12, p23) + _comm(m13, p23))
    three = d(p13, 1) - d(p12, 2) - (_comm(p12, p13) + _comm(p12, p23) + _comm(m23, p13))
    return [one, two, three]


def reflection_residual(kap: DynTensor, rp: DynTensor, rm: DynTensor) -> DynTensor:
    """sum (x_k)_1 d(kappa_2 + r^+) - (x_k)_2 d(kappa_1 + r^-) - [kappa_1 + r^-, kappa_2 + r^+]."""
    K = ("k", "g", "g", "k")
    k1 = kap.embed(K, [0, 1, 3])
    k2 = kap.embed(K, [0, 2, 3])
    p = rp.embed(K, [1, 2])
    mi = rm.embed(K, [1, 2])
    left = k1 + mi
    right = k2 + p
    return dynamical_derivative(right, 1) - dynamical_derivative(left, 2) - _comm(left, right)


def _expanded_support(T: DynTensor, m: int) -> list:
    return sorted(T.expand(m))


CDYBE_NAMES = ("cdybe_1", "cdybe_2", "cdybe_3")


def verify_cdybe(g: SplitLieAlgebra, m: int, control: bool = False) -> list:
    """One report per identity; ``control`` swaps r^- for r^+ in the first one."""
    rp, rm = folded_r(g, 1), folded_r(g, -1)
    res = cdybe_residuals(rp, rm)
    if control:
        res[0] = cdybe_residuals(rp, rp)[0]
    out = []
    for name, R in zip(CDYBE_NAMES, res):
        sup = _expanded_support(R, m)
        out.append(Report(name + ("_control" if control and name == "cdybe_1" else ""),
                          R.is_zero() and not sup, m, {"symbolic_zero": R.is_zero()}, sup))
    return out if not control else out[:1]


def verify_reflection(g: SplitLieAlgebra, m: int, kap: DynTensor | None = None) -> Report:
    R = reflection_residual(kappa(g) if kap is None else kap, folded_r(g, 1), folded_r(g, -1))
    sup = _expanded_support(R, m)
    return Report("reflection", R.is_zero() and not sup, m, {"symbolic_zero": R.is_zero()}, sup)


# ---------------------------------------------------------------------------
# operators on V_l (x) U_1 (x) ... (x) U_N (x) V_r^*


class LegRealization:
    """Coefficient objects for U(k) (x) U(g)^N (x) U(k).

    Universal mode builds ``TensorElement`` objects, represented mode builds
    matrices (sigma_l, tau_1, ..., tau_N, sigma_r^*).
    """

    def __init__(self, g: SplitLieAlgebra, N: int, modules: tuple | None = None):
        self.g = g
        self.N = N
        self.kinds = ("k",) + ("g",) * N + ("k",)
        self.algs = _algs(g, self.kinds)
        self.modules = modules
        if modules is not None:
            Vl, Us, Vr = modules
            if len(Us) != N:
                raise ValueError("one g-module per vertex")
            self._mods = [Vl] + list(Us) + [Vr.dual()]
            self.dims = [M.dim for M in self._mods]
            self.dim = int(np.prod(self.dims))
        self._cache: dict = {}

    @property
    def universal(self) -> bool:
        return self.modules is None

    def identity(self):
        if self.universal:
            return TensorElement.one(self.algs)
        return linalg.identity(self.dim)

    def _leg_matrix(self, leg: int, mono) -> np.ndarray:
        key = (leg, mono)
        hit = self._cache.get(key)
        if hit is None:
            M = self._mods[leg]
            hit = M.rep_mono(mono)
            self._cache[key] = hit
        return hit

    def place_key(self, key: tuple, coeff=Fraction(1)):
        """Object for a full key (one monomial per leg)."""
        if self.universal:
            return TensorElement(self.algs, {key: coeff})
        return linalg.kron_all([self._leg_matrix(l, mono) for l, mono in enumerate(key)]) * coeff

    def place(self, factors: dict, coeff=Fraction(1)):
        """Object for {leg: UEAElement}; missing legs carry 1."""
        keys = [((), Fraction(1))]
        for leg in range(len(self.kinds)):
            x = factors.get(leg)
            if x is None:
                keys = [(k + ((),), c) for k, c in keys]
            else:
                keys = [(k + (mono,), c * v) for k, c in keys for mono, v in x.terms.items()]
        out = None
        for k, c in keys:
            obj = self.place_key(k, c * coeff)
            out = obj if out is None else out + obj
        return out

    def dyn_parts(self, T: DynTensor, positions: Sequence[int], sign=Fraction(1)) -> list:
        """(order 0, RFunc, object) triples for T placed in the given legs."""
        E = T.embed(self.kinds, positions)
        return [((0,) * self.g.rank, f * sign, self.place_key(key)) for key, f in E.tensor.terms.items()]


def _placed_key(n: int, leg: int, mono) -> tuple:
    return tuple(mono if l == leg else () for l in range(n))


def euler_parts(legs: LegRealization, i: int) -> list:
    """E_i = sum_{ab} G^{-1}_{ab} d_{h_a} (x) (h_b)_i."""
    g = legs.g
    gi = g.rs.gram_inverse
    n = len(legs.kinds)
    parts = []
    for a in range(g.rank):
        for b in range(g.rank):
            if gi[a][b]:
                p = tuple(int(c == a) for c in range(g.rank))
                parts.append((p, gi[a][b], legs.place_key(_placed_key(n, i, (g.h(b),)))))
    return parts


def bkzb_operator(g: SplitLieAlgebra, i: int, N: int, m: int, modules: tuple | None = None,
                  kap: DynTensor | None = None) -> SeriesDiffOp:
    """D_i = E_i - sum_{j<i} r^+_{ji} - kappa_i - sum_{j>i} r^-_{ij}, legs (k, g^N, k)."""
    if not 1 <= i <= N:
        raise ValueError("vertex index out of range")
    legs = modules if isinstance(modules, LegRealization) else LegRealization(g, N, modules)
    rp, rm = folded_r(g, 1), folded_r(g, -1)
    kap = kappa(g) if kap is None else kap
    neg = Fraction(-1)
    parts = euler_parts(legs, i)
    for j in range(1, i):
        parts += legs.dyn_parts(rp, [j, i], neg)
    parts += legs.dyn_parts(kap, [0, i, N + 1], neg)
    for j in range(i + 1, N + 1):
        parts += legs.dyn_parts(rm, [i, j], neg)
    return SeriesDiffOp.from_parts(g.rs, m, parts)


def hamiltonian_N(g: SplitLieAlgebra, N: int, m: int, modules: tuple | None = None) -> SeriesDiffOp:
    """-Delta/2 - 1/2 sum_R (xi_a - xi_-a)^{-2}(|a|^2/2 + prod_eps(Delta^N(y_a) (x) 1 + xi_{eps a} 1 (x) y_a))."""
    rs = g.rs
    legs = modules if isinstance(modules, LegRealization) else LegRealization(g, N, modules)
    n = len(legs.kinds)
    unit = legs.identity()
    parts = []
    for a in rs.roots:
        j, s = _y_k(g, a)
        ytot = legs.place_key(_placed_key(n, 0, (j,)), s)
        for leg in range(1, N + 1):
            for sym, c in _y_g(g, a).items():
                ytot = ytot + legs.place_key(_placed_key(n, leg, (sym,)), c)
        yr = legs.place_key(_placed_key(n, N + 1, (j,)), s)
        inv_n = Fraction(1) / g.n_of(a)
        s2 = inv_sinh2(rs, a)
        zero = (0,) * rs.rank
        parts.append((zero, s2 * inv_n, amul(ytot, ytot) + amul(yr, yr)))
        parts.append((zero, coth(rs, a) * inv_sinh(rs, a) * inv_n, amul(ytot, yr)))
        parts.append((zero, s2 * (rs.norm2(a) / 2), unit))
    lap = fseries.laplacian(rs, m, unit)
    return (lap + SeriesDiffOp.from_parts(rs, m, parts)).scale(Fraction(-1, 2))


def casimir_N(g: SplitLieAlgebra, N: int, m: int, modules: tuple | None = None) -> SeriesDiffOp:
    """Gauged H_Omega = -2 H^{(N)} - |rho|^2."""
    legs = modules if isinstance(modules, LegRealization) else LegRealization(g, N, modules)
    rs = g.rs
    shift = SeriesDiffOp.from_parts(rs, m, [((0,) * rs.rank, -rs.norm2(rs.rho), legs.identity())])
    return hamiltonian_N(g, N, m, legs).scale(Fraction(-2)) + shift


# ---------------------------------------------------------------------------
# formal N-point spherical functions


@dataclass
class NPointData:
    """V_l with vector v, g-modules U_i with weight-vector indices u_i, V_r with f."""

    Vl: KModule
    v: Sequence
    Us: list
    u_idx: list
    Vr: KModule
    f: Sequence

    @property
    def N(self) -> int:
        return len(self.Us)

    def modules(self) -> tuple:
        return (self.Vl, self.Us, self.Vr)


def weight_chain(g: SplitLieAlgebra, lam, data: NPointData) -> list:
    """[lam_0, ..., lam_N] with lam_{i-1} = lam_i - wt(u_i) and lam_N = lam."""
    lam = _lead(g, lam)
    chain = [lam]
    for U, ui in reversed(list(zip(data.Us, data.u_idx))):
        chain.append(tuple(a - b for a, b in zip(chain[-1], U.weights[ui])))
    return chain[::-1]


def npoint_spherical(g: SplitLieAlgebra, lam, data: NPointData, m: int):
    """sum_mu ((phi_l (x) id) Psi phi_r^mu) xi_mu, coefficients flattened over V_l (x) U (x) V_r^*."""
    from .hcm import SphericalSeries

    lam = _lead(g, lam)
    rs = g.rs
    phr = phi_right(g, lam, data.Vr, data.f, m)
    ops = []
    cur, depth = lam, m
    for U, ui in reversed(list(zip(data.Us, data.u_idx))):
        op = VertexOperator(g, cur, U, ui, depth)
        ops.append(op)
        depth += op.spread
        cur = op.mu
    phl = phi_left(g, cur, data.Vl, data.v, depth)
    coeffs = {}
    for gm in rs.qminus(m):
        X = phr.blocks.get(gm)
        if X is None or X.shape[0] == 0:
            continue
        vec = {gm: X}
        wdim = data.Vr.dim
        for op in ops:
            vec = op.apply(vec, wdim)
            wdim *= op.U.dim
        acc = linalg.zeros((data.Vl.dim, wdim))
        for nu, Y in vec.items():
            acc = acc + phl.blocks[nu] @ Y
        coeffs[gm] = acc.reshape(-1)
    series = FormalSeries(rs, lam, m, coeffs)
    return SphericalSeries(series, {"phi_l": phl.meta, "phi_r": phr.meta, "weights": weight_chain(g, lam, data)})


def tensor_kmodule(Vl: KModule, Us: Sequence[FinDimModule]) -> KModule:
    """Restriction of V_l (x) U_1 (x) ... (x) U_N to k."""
    mods = [Vl] + [KModule.restriction(U) for U in Us]
    dims = [M.dim for M in mods]
    mats = []
    for i in range(len(Vl.g.k_roots)):
        tot = None
        for l, M in enumerate(mods):
            parts = [linalg.identity(d) for d in dims]
            parts[l] = M.ymats[i]
            term = linalg.kron_all(parts)
            tot = term if tot is None else tot + term
        mats.append(tot)
    return KModule(Vl.g, mats, "(x)".join(M.label for M in mods))


def leading_coefficient(g: SplitLieAlgebra, lam, data: NPointData) -> np.ndarray:
    """J_l(lam)(v (x) u) (x) f."""
    J = boundary_fusion(g, lam, data.Vl, data.Us)
    nU = int(np.prod([U.dim for U in data.Us])) if data.Us else 1
    u = linalg.zeros(nU)
    stride = 1
    idx = 0
    for U, ui in reversed(list(zip(data.Us, data.u_idx))):
        idx += ui * stride
        stride *= U.dim
    u[idx] = Fraction(1)
    vu = np.kron(np.asarray(data.v, dtype=object), u)
    return np.kron(J @ vu, np.asarray(data.f, dtype=object).reshape(-1))


def normalized_npoint(g: SplitLieAlgebra, lam, data: NPointData, m: int) -> FormalSeries:
    """delta * F at the shifted weight lam - rho; leading exponent lam."""
    rs = g.rs
    lam = _lead(g, lam)
    shifted = tuple(a - r for a, r in zip(lam, rs.rho.coords))
    F = npoint_spherical(g, shifted, data, m).series
    d = fseries.delta_series(rs, m, 1)
    return d.mul(F, lambda a, b: b * a)


def verify_bkzb_eigen(g: SplitLieAlgebra, lam, data: NPointData, m: int) -> Report:
    """D_i F = ((lam_i,lam_i)/2 - (lam_{i-1},lam_{i-1})/2) F, H^{(N)} F = -(lam_N,lam_N)/2 F, H_Omega F = zeta F."""
    rs = g.rs
    lam = _lead(g, lam)
    N = data.N
    F = normalized_npoint(g, lam, data, m)
    chain = weight_chain(g, lam, data)
    legs = LegRealization(g, N, data.modules())
    details = {}
    support = set()
    for i in range(1, N + 1):
        D = bkzb_operator(g, i, N, m, legs)
        ev = (rs.norm2(chain[i]) - rs.norm2(chain[i - 1])) / 2
        res = D.apply(F) - F.scale(ev)
        details[f"D_{i}"] = res.is_zero()
        support |= set(res.coeffs)
    res = hamiltonian_N(g, N, m, legs).apply(F) + F.scale(rs.norm2(lam) / 2)
    details["hamiltonian"] = res.is_zero()
    support |= set(res.coeffs)
    shifted = tuple(a - r for a, r in zip(lam, rs.rho.coords))
    res = casimir_N(g, N, m, legs).apply(F) - F.scale(eigenvalue(rs, shifted))
    details["casimir"] = res.is_zero()
    support |= set(res.coeffs)
    return Report(f"bkzb_eigen_N{N}", all(details.values()), m, details, sorted(support))


def verify_commutativity(g: SplitLieAlgebra, N: int, m: int, modules: tuple | None = None) -> Report:
    """[D_i, D_j] = 0 and [D_i, H_Omega] = 0 by Leibniz composition of series operators."""
    legs = LegRealization(g, N, modules)
    Ds = [bkzb_operator(g, i, N, m, legs) for i in range(1, N + 1)]
    H = casimir_N(g, N, m, legs)
    details = {}
    support = set()
    for i in range(N):
        for j in range(i + 1, N):
            c = fseries.commutator(Ds[i], Ds[j])
            details[f"[D_{i + 1},D_{j + 1}]"] = c.is_zero()
            support |= {("D", i + 1, j + 1) + p for p in c.terms}
        c = fseries.commutator(Ds[i], H)
        details[f"[D_{i + 1},H]"] = c.is_zero()
        support |= {("H", i + 1) + p for p in c.terms}
    return Report(f"commutativity_N{N}", all(details.values()), m, details, sorted(support))
