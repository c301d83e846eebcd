"""Verification suites: every identity of the construction as a named, seeded check."""
from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import pbw, rank, theta as th, torus, zak
from .series import DeformationParameter, TruncatedSeries, alpha, random_parameter

SUITES = ("axioms", "twist", "zak", "theta", "rank")
SYMBOLIC, ANALYTIC = "symbolic", "analytic"


class ConfigError(ValueError):
    """Invalid engine configuration."""


@dataclass(frozen=True)
class EngineConfig:
    order: int = 4
    tol_symbolic: float = 1e-10
    tol_analytic: float = 1e-8
    samples: int = 20
    seed: int = 0
    term_cap: int = 10_000
    theta: Tuple[complex, ...] = (1.0,)
    format: str = "text"

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError("order must be >= 1")
        if self.tol_symbolic <= 0 or self.tol_analytic <= 0:
            raise ConfigError("tolerances must be positive")
        if self.samples < 1:
            raise ConfigError("need at least one sample point")
        if self.term_cap < 1:
            raise ConfigError("term cap must be positive")
        if not self.theta:
            raise ConfigError("theta needs at least one hbar coefficient")
        if self.format not in ("json", "csv", "text"):
            raise ConfigError(f"unknown format {self.format!r}")

    def parameter(self) -> DeformationParameter:
        coeffs = list(self.theta[: self.order]) + [0.0] * max(0, self.order - len(self.theta))
        return DeformationParameter.from_hbar_coeffs(coeffs, self.order)

    def theta_spec(self) -> str:
        return ",".join(_fmt_complex(c) for c in self.theta)


def _fmt_complex(c: complex) -> str:
    c = complex(c)
    return f"{c.real:g}" if c.imag == 0 else f"{c.real:g}{c.imag:+g}j"


@dataclass(frozen=True)
class VerificationReport:
    check_id: str
    anchor: str
    parameters: Dict[str, object]
    defect: float
    tolerance: float
    passed: bool
    wall_time: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class Check:
    check_id: str
    suite: str
    anchor: str
    kind: str
    run: Callable[["Context"], Tuple[float, Dict[str, object]]]


@dataclass
class Context:
    config: EngineConfig
    check_id: str

    @property
    def N(self) -> int:
        return self.config.order

    @property
    def theta(self) -> DeformationParameter:
        return self.config.parameter()

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, zlib.crc32(self.check_id.encode())])

    def points(self) -> np.ndarray:
        return zak.sample_points(self.config.samples, self.config.seed)

    def section(self, rng, n: int) -> zak.ZakSection:
        return zak.random_section(rng, n, self.N, term_cap=self.config.term_cap)


REGISTRY: List[Check] = []


def check(check_id: str, suite: str, anchor: str, kind: str):
    def deco(fn):
        REGISTRY.append(Check(check_id, suite, anchor, kind, fn))
        return fn
    return deco


# -- axioms -------------------------------------------------------------------------

@check("axioms.pentagon", "axioms", "Phi_234 Phi_1(23)4 Phi_123 = Phi_12(34) Phi_(12)34", SYMBOLIC)
def _pentagon(ctx):
    return pbw.verify_pentagon(ctx.theta), {"N": ctx.N}


@check("axioms.counitality", "axioms", "(id x eps x id) Phi = 1", SYMBOLIC)
def _counit(ctx):
    return max(pbw.verify_counitality(ctx.theta), pbw.verify_twist_counitality(ctx.theta)), {"N": ctx.N}


for _h in "pqt":
    def _qc(ctx, h=_h):
        return pbw.verify_quasi_coassoc(h, ctx.theta), {"N": ctx.N, "generator": h}

    check(f"axioms.quasi_coassoc.{_h}", "axioms", "(id x Delta) Delta(h) = Phi (Delta x id) Delta(h) Phi^-1",
          SYMBOLIC)(_qc)


# -- twist --------------------------------------------------------------------------

@check("twist.composition", "twist", "exp{-p x (theta - theta' - theta theta' t) x q}", SYMBOLIC)
def _composition(ctx):
    rng = ctx.rng()
    worst = 0.0
    for _ in range(10):
        a, b = random_parameter(rng, ctx.N), random_parameter(rng, ctx.N)
        worst = max(worst, pbw.verify_twist_composition(a, b))
    return worst, {"N": ctx.N, "trials": 10}


@check("twist.coassociator", "twist", "Phi_{theta,theta} = exp(theta^2 p x t x q)", SYMBOLIC)
def _coassoc(ctx):
    return pbw.defect(pbw.twisted_coassociator(ctx.theta), pbw.build_coassociator(ctx.theta)), {"N": ctx.N}


@check("twist.coassociator_matched", "twist", "Phi_{theta,alpha_n(theta)} = 1 on t = n", SYMBOLIC)
def _coassoc_matched(ctx):
    ns = (1, 2, -1, 3)
    return max(pbw.coassociator_matched_defect(ctx.theta, n) for n in ns), {"N": ctx.N, "degrees": list(ns)}


@check("twist.alpha_group_law", "twist", "alpha_j alpha_k = alpha_{j+k}", SYMBOLIC)
def _alpha(ctx):
    rng = ctx.rng()
    worst = 0.0
    rs = [Fraction(j) for j in range(-5, 6)] + [Fraction(3, 2), Fraction(-5, 3), Fraction(2, 7)]
    for _ in range(20):
        t = random_parameter(rng, ctx.N, scale=0.5)
        for j in rs:
            for k in rs:
                worst = max(worst, (alpha(j, alpha(k, t)) - alpha(j + k, t)).max_abs())
    return worst, {"N": ctx.N, "trials": 20}


@check("twist.torus_relation", "twist", "U * V = e^{2 pi i theta} V * U", SYMBOLIC)
def _torus_rel(ctx):
    tau = 0.3 + 1.1j
    flat = torus.commutation_defect(ctx.theta).max_abs()
    ell = torus.commutation_defect(ctx.theta, torus.ELLIPTIC, tau).max_abs()
    return max(flat, ell), {"N": ctx.N, "tau": "0.3+1.1j"}


@check("twist.torus_associativity", "twist", "(a * b) * c = a * (b * c) in degree 0", SYMBOLIC)
def _torus_assoc(ctx):
    rng = ctx.rng()
    worst = 0.0
    for _ in range(50):
        a, b, c = (torus.random_element(rng, ctx.N, 3, 1) for _ in range(3))
        scale = max(1.0, torus.star_mul(torus.star_mul(a, b, ctx.theta), c, ctx.theta).max_abs())
        worst = max(worst, torus.associativity_defect(a, b, c, ctx.theta) / scale)
    return worst, {"N": ctx.N, "trials": 50, "relative": True}


# -- zak ----------------------------------------------------------------------------

for _n1, _n2 in ((1, 1), (1, 2), (2, -1)):
    def _oracle(ctx, n1=_n1, n2=_n2):
        rng = ctx.rng()
        f1, f2 = ctx.section(rng, n1), ctx.section(rng, n2)
        pts = ctx.points()
        got = zak.function_eval_many(zak.star_product_zak(f1, f2, ctx.theta), pts)
        ref = zak.direct_twisted_product_many(f1, f2, ctx.theta, pts)
        return zak.relative_defect(got, ref), {"N": ctx.N, "degrees": [n1, n2], "relative": True}

    def _factor(ctx, n1=_n1, n2=_n2):
        rng = ctx.rng()
        f1, f2 = ctx.section(rng, n1), ctx.section(rng, n2)
        d = zak.defect_profile(zak.star_product_zak(f1, f2, ctx.theta), zak.factorized_star(f1, f2, ctx.theta),
                               ctx.points())
        return float(np.max(d)), {"N": ctx.N, "degrees": [n1, n2]}

    check(f"zak.star_oracle.{_n1}_{_n2}", "zak", "f1 * f2 = m(F^-1 (f1 x f2))", ANALYTIC)(_oracle)
    check(f"zak.star_factorized.{_n1}_{_n2}", "zak", "f1 *_theta f2 = sum (-theta)^j/j! p^j f1 *_0 q^j f2",
          ANALYTIC)(_factor)

for _n, _da in ((1, 1), (2, 1), (-1, 2)):
    def _genassoc(ctx, n=_n, da=_da):
        rng = ctx.rng()
        a, b, c = ctx.section(rng, da), ctx.section(rng, n), ctx.section(rng, da)
        d = zak.verify_generalized_associativity(a, b, c, ctx.theta, ctx.points())
        return d, {"N": ctx.N, "degrees": [da, n, da]}

    check(f"zak.generalized_associativity.{_n}", "zak",
          "(a *_{alpha_n(theta)} b) *_theta c = a *_{alpha_n(theta)} (b *_theta c)", ANALYTIC)(_genassoc)


@check("zak.quasi_associativity", "zak", "(f1 * f2) * f3 = (f1 * (f2 * f3)) o exp(theta^2 p x t x q)", ANALYTIC)
def _qa(ctx):
    rng = ctx.rng()
    fs = [ctx.section(rng, 1) for _ in range(3)]
    return zak.verify_quasi_associativity(*fs, ctx.theta, ctx.points()), {"N": ctx.N, "degrees": [1, 1, 1]}


@check("zak.module_actions", "zak", "U.f, f.U, V.f, f.V against m o F^-1", ANALYTIC)
def _actions(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for n in (1, 2, -1):
        f = ctx.section(rng, n)
        tl = alpha(n, ctx.theta)
        for name in "UV":
            g = torus.TorusElement.generator(name, ctx.N)
            right = getattr(zak, f"act_right_{name}")(f, ctx.theta)
            left = getattr(zak, f"act_left_{name}")(f, tl)
            worst = max(worst,
                        zak.relative_defect(zak.function_eval_many(right, pts),
                                            zak.direct_twisted_product_many(f, g, ctx.theta, pts)),
                        zak.relative_defect(zak.function_eval_many(left, pts),
                                            zak.direct_twisted_product_many(g, f, tl, pts)))
    return worst, {"N": ctx.N, "degrees": [1, 2, -1], "relative": True}


@check("zak.bimodule", "zak", "(U.f).V = U.(f.V) with left parameter alpha_n(theta)", ANALYTIC)
def _bimodule(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for n in (1, 2, -1):
        f = ctx.section(rng, n)
        tl = alpha(n, ctx.theta)
        for L in (zak.act_left_U, zak.act_left_V):
            for R in (zak.act_right_U, zak.act_right_V):
                lhs = zak.function_eval_many(R(L(f, tl), ctx.theta), pts)
                rhs = zak.function_eval_many(L(R(f, ctx.theta), tl), pts)
                worst = max(worst, zak.relative_defect(lhs, rhs))
    return worst, {"N": ctx.N, "degrees": [1, 2, -1], "relative": True}


@check("zak.left_representation", "zak", "a.(b.f) = (a *_{theta'} b).f", ANALYTIC)
def _left_rep(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for n in (1, 2, -1):
        f = ctx.section(rng, n)
        tl = alpha(n, ctx.theta)
        a, b = (torus.random_element(rng, ctx.N, 2, 1) for _ in range(2))
        lhs = zak.function_eval_many(zak.left_action(a, zak.left_action(b, f, tl), tl), pts)
        rhs = zak.function_eval_many(zak.left_action(torus.star_mul(a, b, tl), f, tl), pts)
        worst = max(worst, zak.relative_defect(lhs, rhs))
    return worst, {"N": ctx.N, "degrees": [1, 2, -1], "relative": True}


@check("zak.middle_linearity", "zak", "(f1 * a) * f2 = f1 * (a * f2)", ANALYTIC)
def _middle(ctx):
    rng = ctx.rng()
    f1, f2 = ctx.section(rng, 1), ctx.section(rng, 1)
    a = torus.random_element(rng, ctx.N, 2, 1)
    d = zak.defect_profile(zak.star(zak.star(f1, a, ctx.theta), f2, ctx.theta),
                           zak.star(f1, zak.star(a, f2, ctx.theta), ctx.theta), ctx.points())
    return float(np.max(d)), {"N": ctx.N, "degrees": [1, 0, 1]}


@check("zak.pairing_window", "zak", "f1 * f2 = sum U^r V^s (f1 | f2 . V^-s U^-r)", ANALYTIC)
def _pairing(ctx):
    rng = ctx.rng()
    f1, f2 = ctx.section(rng, 1), ctx.section(rng, -1)
    pts = ctx.points()
    ref = zak.direct_twisted_product_many(f1, f2, ctx.theta, pts)
    excess, tails = 0.0, []
    for R in (2, 4, 6, 8):
        P = zak.product_into_A0(f1, f2, ctx.theta, R)
        err = float(np.max(np.abs(zak.function_eval_many(P.element, pts) - ref)))
        excess = max(excess, err - P.tail)
        tails.append(P.tail)
    if any(b > a for a, b in zip(tails, tails[1:])):
        excess = max(excess, 1.0)
    return max(excess, 0.0), {"N": ctx.N, "degrees": [1, -1], "windows": [2, 4, 6, 8],
                              "tails": [float(f"{t:.3g}") for t in tails]}


# -- theta --------------------------------------------------------------------------

TAU = 1j


@check("theta.product", "theta", "c(k) = sum c1(k1) c2(k2) q^{(k1 n2 - k2 n1)^2/(n1 n2 (n1+n2))}", ANALYTIC)
def _theta_product(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for n1, n2 in ((1, 1), (1, 2), (2, 3)):
        u, v = th.random_theta_vector(rng, n1, TAU), th.random_theta_vector(rng, n2, TAU)
        zs, ts = th.elliptic_points(pts, TAU)
        ref = th.theta_eval_many(u, zs, ts) * th.theta_eval_many(v, zs, ts)
        got = th.theta_eval_many(th.theta_product(u, v), zs, ts)
        worst = max(worst, float(np.max(np.abs(got - ref)) / np.max(np.abs(ref))))
    return worst, {"tau": "1j", "relative": True}


@check("theta.commutative_associative", "theta", "holomorphic sector is a commutative associative algebra",
       ANALYTIC)
def _theta_ca(ctx):
    rng = ctx.rng()
    u, v, w = (th.random_theta_vector(rng, n, TAU) for n in (1, 2, 1))
    comm = np.abs(np.subtract(th.theta_product(u, v).c, th.theta_product(v, u).c))
    left = th.theta_product(th.theta_product(u, v), w).c
    right = th.theta_product(u, th.theta_product(v, w)).c
    scale = max(np.max(np.abs(left)), 1.0)
    return float(max(np.max(comm), np.max(np.abs(np.subtract(left, right))) / scale)), {"tau": "1j"}


@check("theta.holomorphy", "theta", "nabla f = (tau d_x - d_y + Im(tau) z d_t) f = 0", ANALYTIC)
def _theta_hol(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    return max(th.holomorphy_defect(th.random_theta_vector(rng, n, TAU), pts) for n in (1, 2, 3)), {"tau": "1j"}


@check("theta.bridge", "theta", "f~(y; k) = c(k) e^{pi i n tau y^2}", ANALYTIC)
def _theta_bridge(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for n in (1, 2, 3):
        u = th.random_theta_vector(rng, n, TAU)
        zs, ts = th.elliptic_points(pts, TAU)
        worst = max(worst, float(np.max(np.abs(th.elliptic_eval_many(th.zak_bridge(u), TAU, zs, ts)[:, 0]
                                                - th.theta_eval_many(u, zs, ts)))))
    return worst, {"tau": "1j"}


@check("theta.undeformed", "theta", "a *_theta b = a b on ker q", ANALYTIC)
def _theta_undeformed(ctx):
    rng = ctx.rng()
    u, v = th.random_theta_vector(rng, 1, TAU), th.random_theta_vector(rng, 2, TAU)
    return th.undeformed_defect(u, v, ctx.theta, ctx.points()), {"N": ctx.N, "tau": "1j"}


# -- rank ---------------------------------------------------------------------------

RANK_PAIRS = ((3, 2), (5, 3))


@check("rank.relation", "rank", "U' * V' = e^{2 pi i (theta'/d^2 + b/d)} V' * U'", SYMBOLIC)
def _rank_rel(ctx):
    rng = ctx.rng()
    worst = 0.0
    for c, d in RANK_PAIRS:
        g = rank.bezout_completion(c, d)
        worst = max(worst, rank.b_commutation_defect(g, random_parameter(rng, ctx.N)).max_abs(),
                    rank.matched_parameter_defect(g, ctx.theta))
    return worst, {"N": ctx.N, "pairs": [list(p) for p in RANK_PAIRS]}


@check("rank.b_associativity", "rank", "B_{b/d} is associative", SYMBOLIC)
def _rank_assoc(ctx):
    rng = ctx.rng()
    worst = 0.0
    for c, d in RANK_PAIRS:
        g = rank.bezout_completion(c, d)
        tl = alpha(Fraction(c, d), ctx.theta)
        for _ in range(10):
            a, b, e = (rank.random_b_element(rng, g, ctx.N, 3, 2) for _ in range(3))
            left = rank.b_star_mul(rank.b_star_mul(a, b, tl), e, tl)
            right = rank.b_star_mul(a, rank.b_star_mul(b, e, tl), tl)
            worst = max(worst, (left - right).max_abs() / max(1.0, left.max_abs()))
    return worst, {"N": ctx.N, "relative": True}


@check("rank.left_representation", "rank", "xi.(eta.f) = (xi *' eta).f", ANALYTIC)
def _rank_rep(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for c, d in RANK_PAIRS:
        g = rank.bezout_completion(c, d)
        tl = alpha(Fraction(c, d), ctx.theta)
        f = rank.random_rank_section(rng, g, ctx.N, term_cap=ctx.config.term_cap)
        xi, eta = (rank.random_b_element(rng, g, ctx.N) for _ in range(2))
        lhs = rank.rank_eval_many(rank.left_action(xi, rank.left_action(eta, f, tl), tl), pts[:, 0], pts[:, 1])
        rhs = rank.rank_eval_many(rank.left_action(rank.b_star_mul(xi, eta, tl), f, tl), pts[:, 0], pts[:, 1])
        worst = max(worst, zak.relative_defect(lhs, rhs))
    return worst, {"N": ctx.N, "pairs": [list(p) for p in RANK_PAIRS], "relative": True}


@check("rank.bimodule_commutation", "rank", "(xi *' f) * a = xi *' (f * a) iff theta' = alpha_{c/d}(theta)", ANALYTIC)
def _bimodule_commutation(ctx):
    worst = 0.0
    for c, d in RANK_PAIRS:
        matched, _ = rank.verify_bimodule_commutation(ctx.theta, c, d, trials=3, seed=ctx.config.seed, points=ctx.points())
        worst = max(worst, matched)
    return worst, {"N": ctx.N, "pairs": [list(p) for p in RANK_PAIRS]}


@check("rank.decompose", "rank", "n = k c + m d, 1 <= k <= d, uniquely", SYMBOLIC)
def _decompose(ctx):
    bad = 0
    for c, d in ((3, 2), (5, 3), (2, 7)):
        for n in range(-50, 51):
            sols = [k for k in range(1, d + 1) if (n - k * c) % d == 0]
            k, m = rank.decompose(n, c, d)
            bad += sols != [k] or k * c + m * d != n
    return float(bad), {"range": 50}


@check("rank.bundle", "rank", "f_k(x, y+1) = f_{k-1}(x, y), f_1(x, y+1) = e^{2 pi i c x} f_d(x, y)", ANALYTIC)
def _bundle(ctx):
    rng = ctx.rng()
    worst = 0.0
    for c, d in RANK_PAIRS:
        f = rank.random_rank_section(rng, rank.bezout_completion(c, d), 0, 2)
        bc = rank.bundle_components(f, grid=8)
        worst = max(worst, bc.shift_defect, bc.twist_defect, bc.reconstruction_defect)
    return worst, {"grid": 8}


@check("rank.leibniz", "rank", "q(f g) = q(f) g + f q(g), t f = (c/d) f", ANALYTIC)
def _leibniz(ctx):
    rng = ctx.rng()
    pts = ctx.points()
    worst = 0.0
    for c, d in RANK_PAIRS:
        g = rank.bezout_completion(c, d)
        f = rank.random_rank_section(rng, g, 0, 2)
        worst = max(worst, rank.leibniz_defect(f, f, pts),
                    rank.leibniz_defect(f, torus.random_element(rng, 0, 2, 1), pts))
    return worst, {"pairs": [list(p) for p in RANK_PAIRS]}


# -- driver -------------------------------------------------------------------------

def checks_for(suite: str) -> List[Check]:
    if suite == "all":
        return sorted(REGISTRY, key=lambda c: c.check_id)
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    return sorted((c for c in REGISTRY if c.suite == suite), key=lambda c: c.check_id)


def run_check(chk: Check, config: EngineConfig) -> VerificationReport:
    tol = config.tol_symbolic if chk.kind == SYMBOLIC else config.tol_analytic
    start = time.perf_counter()
    value, params = chk.run(Context(config, chk.check_id))
    elapsed = time.perf_counter() - start
    params = {**params, "theta": config.theta_spec(), "seed": config.seed}
    value = float(value)
    return VerificationReport(chk.check_id, chk.anchor, params, value, tol,
                              bool(np.isfinite(value) and value <= tol), elapsed)


def run_suite(suite: str, config: EngineConfig) -> List[VerificationReport]:
    return [run_check(c, config) for c in checks_for(suite)]


# -- obstruction sweep ----------------------------------------------------------------

@dataclass(frozen=True)
class Obstruction:
    name: str
    profile: Tuple[float, ...]
    threshold: float

    @property
    def leading_order(self):
        return zak.leading_order(np.asarray(self.profile), self.threshold)


def sweep(config: EngineConfig) -> List[Obstruction]:
    """Per-order magnitudes of the identities that fail when a structural ingredient is dropped."""
    N, theta = config.order, config.parameter()
    rng = np.random.default_rng([config.seed, 7])
    pts = zak.sample_points(config.samples, config.seed)
    out = []
    phi = pbw.build_coassociator(theta)
    out.append(Obstruction("coassociator Phi - 1", tuple((phi - pbw.TensorElement.unit(3, N)).order_profile()),
                           config.tol_symbolic))
    F, Fi = pbw.build_twist(theta), pbw.build_twist_inverse(theta)
    d1 = pbw.twisted_coproduct(pbw.generator("p", N), 0, F, Fi)
    bare = pbw.twisted_coproduct(d1, 1, F, Fi) - pbw.twisted_coproduct(d1, 0, F, Fi)
    out.append(Obstruction("quasi-coassociativity of p without Phi", tuple(bare.order_profile()),
                           config.tol_symbolic))
    fs = [zak.random_section(rng, 1, N, term_cap=config.term_cap) for _ in range(3)]
    out.append(Obstruction("quasi-associativity without Phi",
                           tuple(zak.quasi_associativity_profile(*fs, theta, pts, with_coassociator=False)),
                           config.tol_analytic))
    a, b, c = (zak.random_section(rng, 1, N, term_cap=config.term_cap) for _ in range(3))
    out.append(Obstruction("generalized associativity, theta' = theta",
                           tuple(zak.generalized_associativity_profile(a, b, c, theta, pts, theta_left=theta)),
                           config.tol_analytic))
    g = rank.bezout_completion(3, 2)
    xi = rank.random_b_element(rng, g, N)
    f = rank.random_rank_section(rng, g, N, term_cap=config.term_cap)
    e = torus.random_element(rng, N, 2, 1)
    out.append(Obstruction("B/A0 commutation, theta' = theta, (c,d) = (3,2)",
                           tuple(rank.bimodule_commutation_profile(xi, f, e, theta, theta, pts)), config.tol_analytic))
    f1 = zak.random_section(rng, 1, N, term_cap=config.term_cap)
    f2 = zak.random_section(rng, -1, N, term_cap=config.term_cap)
    diff = zak.pairing_coefficient(f1, f2, 1, 1, theta) - zak.pairing_coefficient(f1, f2, 1, 1, theta, theta)
    out.append(Obstruction("pairing with unadjusted right parameter", tuple(np.abs(diff.coeffs)),
                           config.tol_analytic))
    return out


def report_dict(r: VerificationReport, timings: bool = False) -> Dict[str, object]:
    d = asdict(r)
    d["defect"] = float(f"{r.defect:.3g}")
    if not timings:
        d.pop("wall_time")
    else:
        d["wall_time"] = float(f"{r.wall_time:.3g}")
    return d
