"""Harish-Chandra series, formal spherical functions and their eigen-equations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import fseries, linalg
from .envalg import SplitLieAlgebra, TensorElement
from .fseries import FormalSeries, SeriesDiffOp, amul
from .intertwine import GradedMap, KModule, NonGenericWeight, phi_left, phi_right
from .radial import LegAction, hamiltonian, pi_hat_casimir
from .scalars import is_zero
from .verma import _lead


@dataclass
class HCSeries:
    """Phi_lam = sum_gamma Gamma_gamma xi_{lam+gamma}; matrices or U(k)^{(x)2} tensors."""

    g: SplitLieAlgebra
    lam: tuple
    mode: str
    m: int
    coeffs: dict
    sigma: tuple | None = None

    def series(self) -> FormalSeries:
        return FormalSeries(self.g.rs, self.lam, self.m, self.coeffs)

    def coeff(self, gamma):
        return self.coeffs.get(tuple(gamma))


@dataclass
class SphericalSeries:
    """Vector-valued formal series with a record of how it was built."""

    series: FormalSeries
    provenance: dict = field(default_factory=dict)

    def coeff(self, gamma):
        return self.series.coeff(gamma, None)


def eigenvalue(rs, lam) -> Fraction:
    """zeta_lam(Omega) = (lam, lam + 2 rho)."""
    return rs.pairing(lam, [a + 2 * r for a, r in zip(lam, rs.rho.coords)])


def _scalar_part(x, ident):
    """If x == c * ident return c, else None."""
    if isinstance(x, np.ndarray):
        c = x[0, 0]
        return c if linalg.is_zero_array(x - ident * c) else None
    c = x.terms.get(tuple(() for _ in x.algs), Fraction(0))
    return c if (x - ident * c).is_zero() else None


def hc_recursion(op: SeriesDiffOp, lam: tuple, m: int, ident, zeta) -> dict:
    """Coefficients Gamma_gamma of the eigenseries of ``op`` with leading term ``ident``.

    The height-0 part of op must act on xi_{lam+gamma} as a scalar; the
    recursion divides by that scalar minus ``zeta``.
    """
    rs = op.rs
    z = (0,) * rs.rank
    out = {z: ident}
    # split coefficients by shift
    shifts: dict = {}
    for p, s in op.terms.items():
        for d, c in s.coeffs.items():
            shifts.setdefault(d, []).append((p, c))
    for gm in rs.qminus(m):
        if gm == z:
            continue
        mu = tuple(a + b for a, b in zip(lam, gm))
        diag = None
        rhs = None
        for d, plist in shifts.items():
            src = tuple(x - y for x, y in zip(gm, d))
            if d == z:
                for p, c in plist:
                    f = op._dpow(mu, p)
                    if f:
                        diag = c * f if diag is None else diag + c * f
                continue
            if src not in out:
                continue
            if any(x > 0 for x in src):
                continue
            nu = tuple(a + b for a, b in zip(lam, src))
            for p, c in plist:
                f = op._dpow(nu, p)
                if f == 0:
                    continue
                t = amul(c, out[src]) * f
                rhs = t if rhs is None else rhs + t
        dval = _scalar_part(diag, ident) if diag is not None else Fraction(0)
        if dval is None:
            raise AssertionError("height-zero part of the operator is not scalar")
        denom = dval - zeta
        if rhs is None or is_zero(rhs):
            continue
        if denom == 0:
            raise NonGenericWeight(f"Harish-Chandra recursion breaks down at offset {gm}", gm)
        out[gm] = rhs * (Fraction(-1) / denom) if not isinstance(denom, Fraction) else rhs * (-1 / denom)
    return out


def hc_coefficients(g: SplitLieAlgebra, lam, m: int, sigma: tuple | None = None) -> HCSeries:
    """Harish-Chandra coefficients; represented when sigma = (V_l, V_r) is given."""
    rs = g.rs
    lam = _lead(g, lam)
    if not rs.is_hc_generic(lam, m):
        bad = next(gm for gm in rs.qminus(m) if any(gm) and rs.hc_obstruction(lam, gm) == 0)
        raise NonGenericWeight(f"weight is not generic at offset {bad}", bad)
    op = pi_hat_casimir(g, m, sigma)
    legs = LegAction(g, sigma)
    coeffs = hc_recursion(op, lam, m, legs.identity(), eigenvalue(rs, lam))
    return HCSeries(g, lam, "universal" if sigma is None else "represented", m, coeffs, sigma)


def push_universal(hc: HCSeries, sigma: tuple) -> dict:
    """Apply sigma_l (x) sigma_r^* to universal coefficients."""
    legs = LegAction(hc.g, sigma)
    out = {}
    for gm, t in hc.coeffs.items():
        acc = linalg.zeros((legs.dim, legs.dim))
        for (a, b), c in t.terms.items():
            acc = acc + legs.mono_pair(a, b) * c
        out[gm] = acc
    return out


def formal_spherical(phl: GradedMap, phr: GradedMap, m: int | None = None) -> SphericalSeries:
    """Coefficient at gamma: phi_l restricted to M[gamma] composed with phi_r projected to it."""
    V = phl.verma
    if phr.verma.lam != V.lam:
        raise ValueError("intertwiners must share the highest weight")
    m = min(phl.m, phr.m) if m is None else m
    rs = V.rs
    coeffs = {}
    for gm in rs.qminus(m):
        if gm not in phl.blocks or gm not in phr.blocks:
            continue
        A = phl.blocks[gm]
        B = phr.blocks[gm]
        if A.shape[1] != B.shape[0]:
            raise ValueError(f"block shapes disagree at {gm}")
        coeffs[gm] = (A @ B).reshape(-1)
    return SphericalSeries(FormalSeries(rs, V.lam, m, coeffs), {"phi_l": phl.meta, "phi_r": phr.meta})


@dataclass
class Report:
    name: str
    passed: bool
    m: int
    details: dict = field(default_factory=dict)
    residual_support: list = field(default_factory=list)


def _support(s: FormalSeries) -> list:
    return sorted(s.coeffs)


def verify_mainTHMF(g: SplitLieAlgebra, lam, sigma: tuple, v, f, m: int) -> Report:
    """(a) eigen-equation of F, (b) coefficients equal Gamma S_lam, (c) F = Phi (v (x) f)."""
    rs = g.rs
    lam = _lead(g, lam)
    Vl, Vr = sigma
    phl = phi_left(g, lam, Vl, v, m)
    phr = phi_right(g, lam, Vr, f, m)
    F = formal_spherical(phl, phr, m).series
    op = pi_hat_casimir(g, m, sigma)
    res_a = op.apply(F) - F.scale(eigenvalue(rs, lam))
    hc = hc_coefficients(g, lam, m, sigma)
    S = np.kron(np.asarray(v, dtype=object), np.asarray(f, dtype=object).reshape(-1))
    ok_b = True
    bad_b = []
    for gm in rs.qminus(m):
        want = hc.coeffs[gm] @ S if gm in hc.coeffs else linalg.zeros(len(S))
        got = F.coeff(gm, None)
        got = linalg.zeros(len(S)) if got is None else got
        if not linalg.is_zero_array(want - got):
            ok_b = False
            bad_b.append(gm)
    phi_vf = hc.series().map(lambda c: c @ S)
    res_c = F - phi_vf
    passed = res_a.is_zero() and ok_b and res_c.is_zero()
    return Report(
        "mainTHMF",
        passed,
        m,
        {"a": res_a.is_zero(), "b": ok_b, "c": res_c.is_zero()},
        sorted(set(_support(res_a)) | set(bad_b) | set(_support(res_c))),
    )


def normalized_spherical(g: SplitLieAlgebra, lam, sigma: tuple, v, f, m: int) -> SphericalSeries:
    """delta * F built from intertwiners at lam - rho; leading exponent lam."""
    rs = g.rs
    lam = _lead(g, lam)
    shifted = tuple(a - r for a, r in zip(lam, rs.rho.coords))
    Vl, Vr = sigma
    F = formal_spherical(phi_left(g, shifted, Vl, v, m), phi_right(g, shifted, Vr, f, m), m).series
    d = fseries.delta_series(rs, m, 1)
    return SphericalSeries(d.mul(F, lambda a, b: b * a), {"shifted_weight": shifted})


def verify_schrodinger(g: SplitLieAlgebra, lam, sigma: tuple, v, f, m: int) -> Report:
    """H F = -(lam,lam)/2 F and delta Pi-hat(Omega) delta^{-1} F = zeta_{lam-rho}(Omega) F."""
    rs = g.rs
    lam = _lead(g, lam)
    F = normalized_spherical(g, lam, sigma, v, f, m).series
    H = hamiltonian(g, m, sigma)
    res1 = H.apply(F) + F.scale(rs.norm2(lam) / 2)
    d = fseries.delta_series(rs, m, 1)
    dinv = fseries.delta_series(rs, m, -1)
    HO = pi_hat_casimir(g, m, sigma).conjugate(d, dinv)
    shifted = tuple(a - r for a, r in zip(lam, rs.rho.coords))
    res2 = HO.apply(F) - F.scale(eigenvalue(rs, shifted))
    return Report(
        "schrodinger",
        res1.is_zero() and res2.is_zero(),
        m,
        {"hamiltonian": res1.is_zero(), "casimir": res2.is_zero()},
        sorted(set(_support(res1)) | set(_support(res2))),
    )
