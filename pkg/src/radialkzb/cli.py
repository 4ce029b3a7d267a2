"""Command-line driver: Harish-Chandra coefficient tables and verification reports.

Exit codes: 0 when every check passes, 1 when a verification fails, 2 for
usage, configuration or genericity errors.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import hcm, kzb, radial, rankone
from .envalg import TensorElement, lie_algebra
from .intertwine import KModule, NonGenericWeight
from .rootdata import SUPPORTED_TYPES, UnsupportedType, WeightVec
from .scalars import format_scalar, parse_scalar
from .verma import irrep

VERSION = "1"
SUITES = ("radial", "mainthmf", "kzb", "cdybe", "reflection", "poisson")


class ConfigError(ValueError):
    """Bad flags, config file or data."""


@dataclass
class RunConfig:
    cartan_type: str = "A1"
    m: int = 6
    weights: list = field(default_factory=list)
    basis: str = "fund"
    sigma: str | None = None
    seed: int = 0
    trials: int = 50
    out: str | None = None

    def echo(self) -> dict:
        d = asdict(self)
        d["weights"] = [format_scalar(w) for w in self.weights]
        return d


_DEFAULTS = RunConfig()


def _load_toml(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return data.get("run", data)


def _parse_weights(text) -> list:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        items = [str(x) for x in text]
    else:
        items = [s for s in re.split(r"[;,\s]+", str(text).strip()) if s]
    try:
        out = [parse_scalar(s) for s in items]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for w in out:
        if not isinstance(w, Fraction):
            raise ConfigError("weights must be rational")
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_toml(getattr(args, "config", None))

    def pick(name, key=None):
        val = getattr(args, name, None)
        if val is not None:
            return val
        return file_cfg.get(key or name, getattr(_DEFAULTS, name if name != "lam" else "weights"))

    cfg = RunConfig(
        cartan_type=str(pick("cartan_type", "type")),
        m=int(pick("m")),
        weights=_parse_weights(pick("lam", "lambda") or None),
        basis=str(pick("basis")),
        sigma=pick("sigma"),
        seed=int(pick("seed")),
        trials=int(pick("trials")),
        out=pick("out"),
    )
    if cfg.cartan_type not in SUPPORTED_TYPES:
        raise ConfigError(f"unsupported Cartan type {cfg.cartan_type!r}; supported: {', '.join(SUPPORTED_TYPES)}")
    if cfg.m < 0:
        raise ConfigError("truncation height must be nonnegative")
    if cfg.basis not in ("fund", "root"):
        raise ConfigError("basis must be 'fund' or 'root'")
    return cfg


def _lam(cfg: RunConfig, g, default) -> tuple:
    w = cfg.weights or list(default)
    if len(w) != g.rank:
        raise ConfigError(f"weight needs {g.rank} coordinates")
    return g.rs.fund_to_root(WeightVec(tuple(w), cfg.basis)).coords


_SIGMA_SPLIT = re.compile(r",(?=chi:|irrep:)")


def _kmodule(g, text: str, right: bool) -> KModule:
    kind, _, body = text.partition(":")
    if kind == "chi":
        vals = [parse_scalar(s) for s in body.split(";") if s]
        # the right leg acts through the dual, so chi:nu there means V_r^* = chi_nu
        if right:
            vals = [-v for v in vals]
        return KModule.character(g, vals if len(vals) > 1 else vals[0])
    if kind == "irrep":
        hw = _parse_weights(body)
        return KModule.restriction(irrep(g, WeightVec(tuple(hw), "fund")), f"res irrep({body})")
    raise ConfigError(f"unknown module spec {text!r}")


def parse_sigma(g, text: str) -> tuple:
    parts = _SIGMA_SPLIT.split(text)
    if len(parts) != 2:
        raise ConfigError("sigma needs two module specs: left,right")
    try:
        return _kmodule(g, parts[0], False), _kmodule(g, parts[1], True)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _default_sigma(g) -> str:
    return "chi:i/3,chi:i/5" if g.rank == 1 else "irrep:1;0,irrep:1;0"


# ---------------------------------------------------------------------------
# hc


def _tensor_rows(gkey: str, t: TensorElement) -> list:
    rows = []
    for (a, b), c in sorted(t.terms.items()):
        rows.append([gkey, t.algs[0].mono_str(a), t.algs[1].mono_str(b), format_scalar(c)])
    return rows


def cmd_hc(cfg: RunConfig, universal: bool) -> int:
    import csv

    g = lie_algebra(cfg.cartan_type)
    lam = _lam(cfg, g, [Fraction(1, 2)] * g.rank)
    sigma = None if universal else parse_sigma(g, cfg.sigma or _default_sigma(g))
    hc = hcm.hc_coefficients(g, lam, cfg.m, sigma)
    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    series = hc.series()
    if universal:
        rows = []
        for gm in series.support():
            rows += _tensor_rows(";".join(str(x) for x in gm), series.coeffs[gm])
        with open(out / "hc_coefficients.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma_coords", "entry_row", "entry_col", "value"])
            w.writerows(rows)
        nrows = len(rows)
    else:
        with open(out / "hc_coefficients.csv", "w") as fh:
            text = series.to_csv(fh)
        nrows = text.count("\n") - 1
    meta = {
        "version": VERSION,
        "config": cfg.echo(),
        "mode": hc.mode,
        "lead_root_coords": [format_scalar(x) for x in hc.lam],
        "rows": nrows,
        "entry_convention": "U(k) monomials" if universal else "matrix on V_l (x) V_r^*",
    }
    with open(out / "hc_metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {nrows} rows to {out / 'hc_coefficients.csv'}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _record(name: str, anchor: str, passed: bool, m: int, support, t0: float) -> dict:
    return {
        "name": name,
        "paper_anchor": anchor,
        "pass": bool(passed),
        "m": m,
        "residual_support": [str(s) for s in support][:50],
        "wall_time_ms": round((time.perf_counter() - t0) * 1000, 3),
    }


def _from_report(rep: hcm.Report, anchor: str, t0: float, name: str | None = None, invert: bool = False) -> dict:
    passed = (not rep.passed) if invert else rep.passed
    return _record(name or rep.name, anchor, passed, rep.m, [] if invert else rep.residual_support, t0)


def suite_radial(cfg: RunConfig) -> list:
    g = lie_algebra(cfg.cartan_type)
    rng = random.Random(cfg.seed)
    out = []
    t0 = time.perf_counter()
    bad = []
    for k in range(cfg.trials):
        x = radial.random_pbw_monomial(g, rng, 4)
        for _ in range(3):
            a = radial.TorusPoint.random(g.rs, rng)
            if not radial.verify_gamma(x, a):
                bad.append((k, g.U.mono_str(next(iter(x.terms))), a.t))
    out.append(_record("radial_gamma_oracle", "uniqueness of the radial component", not bad, cfg.m, bad, t0))
    t0 = time.perf_counter()
    closed = radial.radial_casimir(g)
    rew = radial.radial_component(g.casimir())
    diff = closed - rew
    ex_c, ex_r = closed.expand(cfg.m), rew.expand(cfg.m)
    ok = diff.is_zero() and ex_c == ex_r
    out.append(_record("radial_casimir_closed_form", "radial component of the Casimir element", ok, cfg.m,
                       sorted(map(str, diff.terms)), t0))
    return out


def _vectors(rng: random.Random, n: int) -> list:
    return [Fraction(rng.choice([-3, -2, -1, 1, 2, 3])) for _ in range(n)]


def suite_mainthmf(cfg: RunConfig) -> list:
    g = lie_algebra(cfg.cartan_type)
    rng = random.Random(cfg.seed)
    lam = _lam(cfg, g, [Fraction(3, 7), Fraction(-2, 9)][: g.rank] if g.rank <= 2 else [Fraction(3, 7)] * g.rank)
    sigma = parse_sigma(g, cfg.sigma or _default_sigma(g))
    v = _vectors(rng, sigma[0].dim)
    f = _vectors(rng, sigma[1].dim)
    out = []
    t0 = time.perf_counter()
    rep = hcm.verify_mainTHMF(g, lam, sigma, v, f, cfg.m)
    out.append(_from_report(rep, "formal spherical function equals Harish-Chandra series", t0, "mainthmf"))
    t0 = time.perf_counter()
    lam_n = tuple(a + r for a, r in zip(lam, g.rs.rho.coords))
    rep = hcm.verify_schrodinger(g, lam_n, sigma, v, f, cfg.m)
    out.append(_from_report(rep, "spin Calogero-Moser Schroedinger equation", t0, "schrodinger"))
    return out


def _kzb_setup(g):
    if g.rank == 1:
        U = irrep(g, (1,))
        V = KModule.restriction(irrep(g, (Fraction(1, 2),)))
        return U, V, [1, 2], [1, -3]
    U = irrep(g, WeightVec((1,) + (0,) * (g.rank - 1), "fund"))
    V = KModule.restriction(U)
    return U, V, [1] * V.dim, [1] + [0] * (V.dim - 1)


def suite_kzb(cfg: RunConfig) -> list:
    g = lie_algebra(cfg.cartan_type)
    lam = _lam(cfg, g, [Fraction(3, 7), Fraction(-2, 9)][: g.rank] if g.rank <= 2 else [Fraction(3, 7)] * g.rank)
    U, V, v, f = _kzb_setup(g)
    zero_idx = next((i for i, w in enumerate(U.weights) if not any(w)), 0)
    out = []
    t0 = time.perf_counter()
    out.append(_from_report(kzb.verify_relations(g), "folded r-matrices, k-matrix and bridge identities", t0))
    m_fact = min(cfg.m, 6)
    for which in "ab":
        t0 = time.perf_counter()
        rep = kzb.verify_factorization(g, which, lam, U, zero_idx, m_fact)
        out.append(_from_report(rep, f"factorisation {which} of the Casimir element on vertex operators", t0))
    t0 = time.perf_counter()
    rep = kzb.verify_factorization(g, "a", lam, U, zero_idx, m_fact, drop_d=True)
    out.append(_from_report(rep, "negative control: factorisation a without its Cartan term", t0,
                            "factorization_a_control", invert=True))
    t0 = time.perf_counter()
    rep = kzb.verify_twisted_commutation(g, lam, U, zero_idx, m_fact)
    out.append(_from_report(rep, "symmetric tensor commutation with vertex operators", t0))
    n_max = 2 if g.rank == 1 else 1
    for N in range(1, n_max + 1):
        t0 = time.perf_counter()
        idx = [zero_idx] * N
        data = kzb.NPointData(V, v, [U] * N, idx, V, f)
        rep = kzb.verify_bkzb_eigen(g, lam, data, min(cfg.m, 5))
        out.append(_from_report(rep, "boundary KZB eigen-equations for N-point spherical functions", t0))
    if g.rank == 1:
        t0 = time.perf_counter()
        rep = kzb.verify_commutativity(g, 2, min(cfg.m, 8), (V, [U, U], V))
        out.append(_from_report(rep, "commuting boundary KZB operators and Hamiltonian", t0))
    return out


def suite_cdybe(cfg: RunConfig) -> list:
    g = lie_algebra(cfg.cartan_type)
    out = []
    t0 = time.perf_counter()
    for k, rep in enumerate(kzb.verify_cdybe(g, cfg.m)):
        out.append(_from_report(rep, f"mixed classical dynamical Yang-Baxter equation {k + 1}", t0))
        t0 = time.perf_counter()
    rep = kzb.verify_cdybe(g, cfg.m, control=True)[0]
    out.append(_from_report(rep, "negative control: r-minus replaced by r-plus", t0, "cdybe_control", invert=True))
    return out


def suite_reflection(cfg: RunConfig) -> list:
    g = lie_algebra(cfg.cartan_type)
    out = []
    t0 = time.perf_counter()
    out.append(_from_report(kzb.verify_reflection(g, cfg.m), "mixed classical dynamical reflection equation", t0))
    t0 = time.perf_counter()
    rep = kzb.verify_reflection(g, cfg.m, kzb.kappa(g).scale(2))
    out.append(_from_report(rep, "negative control: doubled k-matrix", t0, "reflection_control", invert=True))
    return out


def _chi_params(cfg: RunConfig) -> tuple:
    text = cfg.sigma or "chi:i/3,chi:i/5"
    parts = _SIGMA_SPLIT.split(text)
    if len(parts) != 2 or not all(p.startswith("chi:") for p in parts):
        raise ConfigError("poisson needs sigma of the form chi:nu_l,chi:nu_r")
    return tuple(parse_scalar(p[4:]) for p in parts)


def suite_poisson(cfg: RunConfig) -> list:
    if cfg.cartan_type != "A1":
        raise ConfigError("poisson is a rank-one check; use --type A1")
    g = lie_algebra("A1")
    lam = _lam(cfg, g, [Fraction(1, 2)])
    lam_c = g.rs.root_to_fund(WeightVec(lam)).coords[0]
    nu_l, nu_r = _chi_params(cfg)
    out = []
    t0 = time.perf_counter()
    rep = rankone.verify_poisson(lam_c, nu_l, nu_r, cfg.m)
    out.append(_record("poisson", "Poisson kernel identity for Meixner-Pollaczek polynomials", rep.passed, cfg.m,
                       rep.mismatches, t0))
    t0 = time.perf_counter()
    sigma = (KModule.character(g, nu_l), KModule.character(g, -nu_r))
    hc = hcm.hc_coefficients(g, lam, cfg.m, sigma)
    want = rankone.poisson_series(lam_c, nu_l, nu_r, cfg.m)
    bad = [n for n in range(cfg.m + 1) if (hc.coeff((-n,))[0, 0] if hc.coeff((-n,)) is not None else 0) != want[n]]
    out.append(_record("hc_vs_rank_one", "Harish-Chandra coefficients against the rank-one closed form", not bad,
                       cfg.m, bad, t0))
    return out


_SUITE_FUNCS = {
    "radial": suite_radial,
    "mainthmf": suite_mainthmf,
    "kzb": suite_kzb,
    "cdybe": suite_cdybe,
    "reflection": suite_reflection,
    "poisson": suite_poisson,
}


def make_report(config: dict, checks: list) -> dict:
    checks = sorted(checks, key=lambda c: c["name"])
    return {"version": VERSION, "config": config, "checks": checks, "pass": all(c["pass"] for c in checks)}


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        for c in report["checks"]:
            print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}")
    else:
        sys.stdout.write(text)


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    names = [s for s in SUITES if s != "poisson" or cfg.cartan_type == "A1"] if suite == "all" else [suite]
    checks = []
    for s in names:
        checks += _SUITE_FUNCS[s](cfg)
    echo = cfg.echo()
    echo["suite"] = suite
    report = make_report(echo, checks)
    _emit(report, cfg.out)
    return 0 if report["pass"] else 1


def cmd_report_merge(paths: list, out: str | None) -> int:
    if not paths:
        raise ConfigError("report-merge needs at least one report")
    checks = []
    for p in paths:
        try:
            data = json.loads(Path(p).read_text())
            checks += list(data["checks"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"malformed report {p}: {exc}") from exc
    for c in checks:
        if not isinstance(c, dict) or "name" not in c or "pass" not in c:
            raise ConfigError("malformed check record")
    report = make_report({"merged": [str(p) for p in paths]}, checks)
    _emit(report, out)
    return 0 if report["pass"] else 1


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML file; flags override its values")
    p.add_argument("--type", dest="cartan_type", help=f"Cartan type ({', '.join(SUPPORTED_TYPES)})")
    p.add_argument("--m", type=int, help="truncation height")
    p.add_argument("--lambda", dest="lam", help="weight coordinates, e.g. 1/2 or 3/7;-2/9")
    p.add_argument("--basis", choices=["fund", "root"], help="basis of --lambda (default fund)")
    p.add_argument("--sigma", help="left,right k-modules: chi:nu or irrep:c1;c2")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radialkzb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("hc", help="Harish-Chandra coefficients as CSV plus JSON metadata")
    _common(p)
    p.add_argument("--universal", action="store_true", help="U(k) (x) U(k) coefficients instead of matrices")
    p = sub.add_parser("verify", help="run a verification suite and emit a JSON report")
    p.add_argument("suite", choices=SUITES + ("all",))
    _common(p)
    p.add_argument("--trials", type=int, help="random monomials for the radial oracle")
    p = sub.add_parser("report-merge", help="merge JSON reports")
    p.add_argument("paths", nargs="*")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report-merge":
            return cmd_report_merge(args.paths, args.out)
        cfg = build_config(args)
        if args.command == "hc":
            return cmd_hc(cfg, args.universal)
        return cmd_verify(cfg, args.suite)
    except (ConfigError, UnsupportedType, NonGenericWeight) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
