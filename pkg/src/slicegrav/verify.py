"""Identity-checking engine.

Every check evaluates the two sides of an identity by independent routes at
randomly sampled points, for random polynomial test functions, and records the
symmetric relative residual ``|lhs - rhs| / (|lhs| + |rhs| + eps)``.

Samples of one case are drawn serially from per-sample random streams derived
from ``(seed, case id, sample index)`` and then evaluated as one batch, so the
result does not depend on how cases are scheduled.
"""

from __future__ import annotations

import concurrent.futures
import logging
import math
import os
import time
import zlib
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .clifford import AlgebraSignature, algebra
from .jetcalc import (
    PolynomialFunction,
    compose_polynomial_with_coordinates,
    jet_index,
    jet_mul,
    jet_scalar_power,
    polynomial_to_jet,
)
from .moebius import (
    DEFAULT_DELTA,
    Dilation,
    GeneratorWord,
    Inversion,
    PointSpace,
    Reflection,
    Translation,
    compose,
    embedded_jet,
    evaluate_map_jet,
    evaluate_point,
    parse_word,
    sample_valid_point,
)
from .operators import (
    OperatorContext,
    apply_euler,
    apply_G,
    apply_G_dagger_iterated,
    apply_G_iterated,
    apply_G_paravector,
    apply_G_paravector_iterated,
)
from .weights import WeightSpec, weight_pair

log = logging.getLogger(__name__)

EPS = 1e-300
TOL_L1, TOL_L3, TOL_L5 = 1e-8, 1e-6, 1e-5
LEMMA_TOL = 1e-7
NULL_TOL = 1e-9
FAILURE_FLOOR = 1e-2

INTERTWINING = ("slice_G", "dagger", "paravector")
LEMMAS = ("inverted_square", "vector_shift_even", "vector_shift_odd", "norm_shift", "euler_flip")
PROOF_STEPS = ("chain_rule", "norm_power", "vector_power")
IDENTITIES = INTERTWINING + LEMMAS + PROOF_STEPS + ("null_solutions",)
PULLBACK = ("inverted_square", "euler_flip", "chain_rule")


def tolerance_for(l: int, tol_l1=TOL_L1, tol_l3=TOL_L3, tol_l5=TOL_L5) -> float:
    if l <= 2:
        return tol_l1
    if l <= 4:
        return tol_l3
    return tol_l5


@dataclass(frozen=True)
class CheckCase:
    """One identity check.

    For ``paravector`` and ``null_solutions`` the space is R + R^p and ``q``
    is ignored.  ``param`` is the exponent m for the |x|^{-m} identities, k
    for the shift identities, and the largest power for ``null_solutions``.
    """

    identity: str
    p: int
    q: int
    l: int = 1
    word: str = "id"
    degree: int = 4
    samples: int = 100
    tolerance: float = TOL_L1
    form: str = "literal"
    perturbation: str | None = None
    negative: bool = False
    param: int | None = None
    delta: float = DEFAULT_DELTA
    max_grade: int = 2

    def __post_init__(self):
        if self.identity not in IDENTITIES:
            raise ValueError(f"unknown identity {self.identity!r}")
        if self.samples < 1:
            raise ValueError("need at least one sample")

    @property
    def space(self) -> PointSpace:
        if self.identity in ("paravector", "null_solutions"):
            return PointSpace.paravector(self.p)
        return PointSpace.vector(self.p, self.q)

    @property
    def case_id(self) -> str:
        parts = [self.identity, f"p{self.p}", f"q{self.q}", f"l{self.l}", self.form]
        if self.param is not None:
            parts.append(f"k{self.param}")
        if self.perturbation:
            parts.append(self.perturbation)
        if self.negative:
            parts.append("neg")
        parts.append(self.word.replace(" ", "_"))
        return ":".join(parts)

    def weight_spec(self) -> WeightSpec:
        if self.identity == "dagger":
            return WeightSpec("g_dagger", 1, self.form, self.perturbation)
        if self.identity == "paravector":
            return WeightSpec("paravector_corollary", 1, self.form, self.perturbation)
        variant = "odd_l" if self.l % 2 else "even_l"
        return WeightSpec(variant, self.l, self.form, self.perturbation)


@dataclass
class Residual:
    lhs: np.ndarray
    rhs: np.ndarray
    rel_error: float
    point: np.ndarray
    sample: int


@dataclass
class CheckReport:
    case: CheckCase
    residuals: list = field(default_factory=list)
    max_rel: float = math.nan
    median_rel: float = math.nan
    passed: bool = False
    wall_time: float = 0.0
    error: str | None = None

    def as_row(self) -> dict:
        c = self.case
        return {
            "id": c.case_id,
            "identity": c.identity,
            "word": c.word,
            "p": c.p,
            "q": c.q,
            "l": c.l,
            "form": c.form,
            "perturbation": c.perturbation,
            "negative": c.negative,
            "samples": c.samples,
            "max_rel": _finite(self.max_rel),
            "median_rel": _finite(self.median_rel),
            "tolerance": FAILURE_FLOOR if c.negative else c.tolerance,
            "pass": self.passed,
            "error": self.error,
        }


def _finite(v):
    return None if v is None or not np.isfinite(v) else float(v)


def symmetric_relative_error(lhs, rhs) -> np.ndarray:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    num = np.linalg.norm(lhs - rhs, axis=-1)
    return num / (np.linalg.norm(lhs, axis=-1) + np.linalg.norm(rhs, axis=-1) + EPS)


# ---------------------------------------------------------------- sampling


def sample_stream(seed: int, case_id: str, index: int) -> np.random.Generator:
    key = zlib.crc32(case_id.encode())
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key, index)))


def random_polynomial(rng, nvars: int, degree: int, m: int, max_grade: int | None = 2) -> PolynomialFunction:
    """Coefficients uniform in [-1, 1] on every blade of grade <= max_grade."""
    idx = jet_index(nvars, degree)
    coeffs = rng.uniform(-1.0, 1.0, (idx.size, 1 << m))
    if max_grade is not None:
        coeffs[:, algebra(m).grades > max_grade] = 0.0
    return PolynomialFunction(coeffs, nvars, degree, m)


def stack_polynomials(polys) -> PolynomialFunction:
    first = polys[0]
    return PolynomialFunction(np.stack([f.coeffs for f in polys]), first.nvars, first.degree, first.m)


def canonical_generators(space: PointSpace) -> list:
    """One representative of each generator type, with generic parameters."""
    b = [0.5 - 0.8 * i for i in range(space.p)]
    a = np.arange(1.0, space.q + 1.0)
    a /= np.linalg.norm(a)
    return [Translation(b), Dilation(1.7), Reflection(tuple(a)), Inversion()]


def random_word(rng: np.random.Generator, space: PointSpace, max_length: int = 3) -> GeneratorWord:
    gens = []
    for _ in range(int(rng.integers(1, max_length + 1))):
        kind = int(rng.integers(4))
        if kind == 0:
            gens.append(Translation(np.round(rng.uniform(-1, 1, space.p), 3)))
        elif kind == 1:
            gens.append(Dilation(float(np.round(rng.choice([-1, 1]) * rng.uniform(0.6, 1.6), 3))))
        elif kind == 2:
            a = rng.normal(size=space.q)
            gens.append(Reflection(tuple(a / np.linalg.norm(a))))
        else:
            gens.append(Inversion())
    return GeneratorWord(tuple(gens), space)


def _draw(case: CheckCase, seed: int, M, space: PointSpace, degree: int):
    xs, polys = [], []
    for i in range(case.samples):
        rng = sample_stream(seed, case.case_id, i)
        xs.append(sample_valid_point(M, space, case.delta, rng))
        polys.append(random_polynomial(rng, space.nvars, degree, space.m, case.max_grade))
    return np.array(xs), stack_polynomials(polys)


# ---------------------------------------------------------------- identity evaluators


def _apply_op(identity: str, f, l: int, space: PointSpace):
    if identity == "paravector":
        return apply_G_paravector_iterated(f, l)
    ctx = OperatorContext(space.signature, f.base_point)
    if identity == "dagger":
        return apply_G_dagger_iterated(f, l, ctx)
    return apply_G_iterated(f, l, ctx)


def intertwining_sides(case: CheckCase, M, space: PointSpace, xs, f: PolynomialFunction):
    """(lhs, rhs) values of Op_y^l f(y) = L Op_x^l [R f(phi(x))] at ``xs``."""
    l, K = case.l, case.l + 1
    ys = evaluate_point(M, space, xs)
    lhs = _apply_op(case.identity, polynomial_to_jet(f, ys, K), l, space).value
    left, right = weight_pair(case.weight_spec(), M, space, xs, K)
    pulled = compose_polynomial_with_coordinates(f, evaluate_map_jet(M, space, xs, K).coords)
    inner = _apply_op(case.identity, jet_mul(right, pulled), l, space).value
    return lhs, M.a.alg.product(left, inner)


def _vec(space: PointSpace, x):
    return space.embed(x)


def lemma_sides(case: CheckCase, space: PointSpace, xs, f: PolynomialFunction):
    """(lhs, rhs) of the operator identities, applied to the test functions."""
    p = space.p
    alg = algebra(space.m)
    sig = space.signature
    ident, k = case.identity, case.param
    x0 = _vec(space, xs)
    n2 = np.sum(xs ** 2, axis=-1)[..., None]

    if ident in PULLBACK:
        # F(x) = f(y), y = -x^{-1}
        M = compose(GeneratorWord((Inversion(),), space))
        ys = evaluate_point(M, space, xs)
        y0 = _vec(space, ys)
        K = 3
        F = compose_polynomial_with_coordinates(f, evaluate_map_jet(M, space, xs, K).coords)
        fy = polynomial_to_jet(f, ys, K)
        cy = OperatorContext(sig, ys)
        ey = apply_euler(fy).value
        if ident == "euler_flip":
            return apply_euler(F).value, -ey
        gy = apply_G(fy, cy)
        if ident == "chain_rule":
            cx = OperatorContext(sig, xs)
            rhs = np.sum(ys ** 2, axis=-1)[..., None] * gy.value - 2.0 * alg.product(y0, ey)
            return apply_G(F, cx).value, rhs
        # G_x^2 x/|x|^m F
        mexp = k
        cx = OperatorContext(sig, xs)
        u = jet_mul(cx.vector(K), jet_scalar_power(cx.norm2_jet(K), -mexp / 2.0))
        lhs = apply_G_iterated(jet_mul(u, F), 2, cx).value
        gy2 = apply_G(gy, cy).value
        c = mexp - p - 1
        w2 = n2 ** (-(mexp + 2) / 2.0)
        rhs = (
            alg.product(x0 * w2, -mexp * c * F.value + 2.0 * c * apply_euler(F).value)
            - 2.0 * w2 * gy.value
            + alg.product(x0 * n2 ** (-(mexp + 4) / 2.0), gy2)
        )
        return lhs, rhs

    ctx = OperatorContext(sig, xs)
    if ident in ("vector_shift_even", "vector_shift_odd", "norm_shift"):
        j = {"vector_shift_even": 2 * k - 2, "vector_shift_odd": 2 * k - 1, "norm_shift": 2 * k - 2}[ident]
        K = j + 1
        F = polynomial_to_jet(f, xs, K)

        def G(n):
            return apply_G_iterated(F, n, ctx)

        if ident == "vector_shift_even":
            lhs = apply_G_iterated(jet_mul(ctx.vector(K), F), j, ctx).value
            rhs = alg.product(x0, G(j).value)
            if j >= 1:
                rhs = rhs - (2 * k - 2) * G(j - 1).value
            return lhs, rhs
        if ident == "vector_shift_odd":
            lhs = apply_G_iterated(jet_mul(ctx.vector(K), F), j, ctx).value
            g = G(j - 1)
            rhs = -(p + 2 * k - 1) * g.value - 2.0 * apply_euler(g).value - alg.product(x0, G(j).value)
            return lhs, rhs
        lhs = apply_G_iterated(jet_mul(ctx.norm2_jet(K), F), j, ctx).value
        rhs = n2 * G(j).value
        if k >= 2:
            g = G(j - 2)
            rhs = rhs - 2 * (k - 1) * ((p + 2 * k - 3) * g.value + 2.0 * apply_euler(g).value)
        return lhs, rhs

    # first-order commutators with |x|^{-m} and x/|x|^m
    mexp = k
    K = 2
    F = polynomial_to_jet(f, xs, K)
    gF = apply_G(F, ctx).value
    s = jet_scalar_power(ctx.norm2_jet(K), -mexp / 2.0)
    wm = n2 ** (-mexp / 2.0)
    if ident == "norm_power":
        lhs = apply_G(jet_mul(s, F), ctx).value
        rhs = alg.product(-mexp * x0 * n2 ** (-(mexp + 2) / 2.0), F.value) + wm * gF
        return lhs, rhs
    lhs = apply_G(jet_mul(jet_mul(ctx.vector(K), s), F), ctx).value
    rhs = wm * ((mexp - p - 1) * F.value - 2.0 * apply_euler(F).value) - alg.product(x0 * wm, gF)
    return lhs, rhs


def paravector_power_polynomial(n: int, nvec: int) -> PolynomialFunction:
    """(x_0 + x_vec)^n expanded by repeated Clifford multiplication."""
    space = PointSpace.paravector(nvec)
    zero = np.zeros(space.nvars)
    X = embedded_jet(space, zero, max(n, 0))
    P = X.like(np.zeros_like(X.coeffs))
    P.coeffs[..., 0, 0] = 1.0
    for _ in range(n):
        P = jet_mul(P, X)
    return PolynomialFunction(P.coeffs.copy(), space.nvars, max(n, 0), space.m)


def null_solution_terms(f: PolynomialFunction, xs):
    """The two terms |x_vec|^2 d_0 f and x_vec E f of the paravector operator."""
    from .jetcalc import jet_partial
    from .operators import paravector_vector_jet

    F = polynomial_to_jet(f, xs, 1)
    vec, n2 = paravector_vector_jet(F, 0)
    alg = algebra(f.m)
    first = n2.value[..., :1] * jet_partial(F, 1).value
    euler = sum(xs[..., j, None] * jet_partial(F, j + 1).value for j in range(1, f.nvars))
    second = alg.product(vec.value, euler)
    return first, second


# ---------------------------------------------------------------- checks


def _finish(report: CheckReport, lhs, rhs, xs, t0):
    rel = symmetric_relative_error(lhs, rhs)
    report.residuals = [Residual(lhs[i], rhs[i], float(rel[i]), xs[i], i) for i in range(len(rel))]
    report.max_rel = float(np.max(rel))
    report.median_rel = float(np.median(rel))
    if report.case.negative:
        report.passed = bool(report.median_rel > FAILURE_FLOOR)
    else:
        report.passed = bool(report.max_rel < report.case.tolerance)
    report.wall_time = time.perf_counter() - t0
    return report


def _degree(case: CheckCase) -> int:
    # G^l annihilates polynomials of degree < l
    return max(case.degree, case.l + 1)


def check_intertwining(case: CheckCase, seed: int = 0) -> CheckReport:
    t0 = time.perf_counter()
    space = case.space
    M = compose(parse_word(case.word, space))
    xs, f = _draw(case, seed, M, space, _degree(case))
    lhs, rhs = intertwining_sides(case, M, space, xs, f)
    return _finish(CheckReport(case), lhs, rhs, xs, t0)


def check_corollary_paravector(case: CheckCase, seed: int = 0) -> CheckReport:
    if case.identity != "paravector":
        raise ValueError("paravector check needs identity 'paravector'")
    return check_intertwining(case, seed)


def check_lemma(case: CheckCase, seed: int = 0) -> CheckReport:
    t0 = time.perf_counter()
    space = case.space
    word = "I" if case.identity in PULLBACK else "id"
    M = compose(parse_word(word, space))
    xs, f = _draw(case, seed, M, space, max(case.degree, 2 * (case.param or 1) + 1))
    lhs, rhs = lemma_sides(case, space, xs, f)
    return _finish(CheckReport(case), lhs, rhs, xs, t0)


def check_null_solutions(case: CheckCase, seed: int = 0) -> CheckReport:
    t0 = time.perf_counter()
    space = case.space
    M = compose(GeneratorWord((), space))
    xs = np.array([sample_valid_point(M, space, case.delta, sample_stream(seed, case.case_id, i)) for i in range(case.samples)])
    firsts, seconds, points = [], [], []
    for n in range(case.param + 1):
        a, b = null_solution_terms(paravector_power_polynomial(n, case.p), xs)
        firsts.append(a)
        seconds.append(-b)
        points.append(xs)
    return _finish(CheckReport(case), np.concatenate(firsts), np.concatenate(seconds), np.concatenate(points), t0)


def negative_control(case: CheckCase, seed: int = 0) -> CheckReport:
    """Runs a deliberately corrupted intertwining check; passes when it fails clearly."""
    return check_intertwining(replace(case, negative=True), seed)


def run_case(case: CheckCase, seed: int = 0) -> CheckReport:
    try:
        if case.identity == "null_solutions":
            return check_null_solutions(case, seed)
        if case.identity in INTERTWINING:
            return check_intertwining(case, seed)
        return check_lemma(case, seed)
    except Exception as exc:  # reported per case, the suite keeps going
        log.warning("case %s raised %s", case.case_id, exc)
        return CheckReport(case, error=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------- suites

SUITES = ("slice", "words", "iterated", "dagger", "paravector", "null", "lemma", "proof", "negative")


@dataclass(frozen=True)
class SuiteConfig:
    signatures: tuple = ((1, 2), (2, 2), (2, 3))
    primary: tuple = (2, 2)
    paravector_dims: tuple = (1, 2)
    max_l: int = 4
    seed: int = 42
    samples: int = 100
    degree: int = 4
    delta: float = DEFAULT_DELTA
    tol_l1: float = TOL_L1
    tol_l3: float = TOL_L3
    tol_l5: float = TOL_L5
    suites: tuple = SUITES
    forms: tuple = ("literal", "corrected")
    random_words: int = 10
    null_points: int = 50
    null_max_power: int = 4

    def as_dict(self) -> dict:
        d = asdict(self)
        return {k: list(map(list, v)) if k == "signatures" else (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}


def build_cases(cfg: SuiteConfig) -> list[CheckCase]:
    cases: list[CheckCase] = []
    common = dict(samples=cfg.samples, degree=cfg.degree, delta=cfg.delta)
    tol = lambda l: tolerance_for(l, cfg.tol_l1, cfg.tol_l3, cfg.tol_l5)  # noqa: E731
    p0, q0 = cfg.primary

    def words(space, count, tag):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(zlib.crc32(tag.encode()),)))
        return [str(random_word(rng, space)) for _ in range(count)]

    if "slice" in cfg.suites:
        for p, q in cfg.signatures:
            for g in canonical_generators(PointSpace.vector(p, q)):
                for form in cfg.forms:
                    cases.append(CheckCase("slice_G", p, q, 1, g.word(), tolerance=tol(1), form=form, **common))
    if "words" in cfg.suites:
        for p, q in cfg.signatures:
            for w in dict.fromkeys(words(PointSpace.vector(p, q), cfg.random_words, f"words:{p}:{q}")):
                for form in cfg.forms:
                    cases.append(CheckCase("slice_G", p, q, 1, w, tolerance=tol(1), form=form, **common))
    if "iterated" in cfg.suites:
        space = PointSpace.vector(p0, q0)
        levels = [l for l in (2, 3, 4, 5) if l <= cfg.max_l]
        for l in levels:
            gens = list(dict.fromkeys([g.word() for g in canonical_generators(space)] + words(space, 3, f"iter:{l}")))
            forms = cfg.forms if l % 2 else ("literal",)
            for w in gens:
                for form in forms:
                    cases.append(CheckCase("slice_G", p0, q0, l, w, tolerance=tol(l), form=form, **common))
    if "dagger" in cfg.suites:
        space = PointSpace.vector(p0, q0)
        for w in dict.fromkeys([g.word() for g in canonical_generators(space)] + words(space, 3, "dagger")):
            for form in cfg.forms:
                cases.append(CheckCase("dagger", p0, q0, 1, w, tolerance=tol(1), form=form, **common))
    if "paravector" in cfg.suites:
        for n in cfg.paravector_dims:
            space = PointSpace.paravector(n)
            for w in dict.fromkeys([g.word() for g in canonical_generators(space)] + words(space, 3, f"para:{n}")):
                for form in cfg.forms:
                    cases.append(CheckCase("paravector", n, 0, 1, w, tolerance=tol(1), form=form, **common))
    if "null" in cfg.suites:
        for n in cfg.paravector_dims:
            cases.append(
                CheckCase("null_solutions", n, 0, 1, "id", samples=cfg.null_points, tolerance=NULL_TOL,
                          param=cfg.null_max_power, delta=cfg.delta)
            )
    if "lemma" in cfg.suites:
        for mexp in (p0 + 1, p0 + 3):
            cases.append(CheckCase("inverted_square", p0, q0, 2, "I", tolerance=LEMMA_TOL, param=mexp, **common))
        for k in (2, 3):
            cases.append(CheckCase("vector_shift_even", p0, q0, 2 * k - 2, "id", tolerance=LEMMA_TOL, param=k, **common))
            cases.append(CheckCase("norm_shift", p0, q0, 2 * k - 2, "id", tolerance=LEMMA_TOL, param=k, **common))
        for k in (1, 2):
            cases.append(CheckCase("vector_shift_odd", p0, q0, 2 * k - 1, "id", tolerance=LEMMA_TOL, param=k, **common))
        cases.append(CheckCase("euler_flip", p0, q0, 1, "I", tolerance=LEMMA_TOL, **common))
    if "proof" in cfg.suites:
        cases.append(CheckCase("chain_rule", p0, q0, 1, "I", tolerance=LEMMA_TOL, **common))
        for mexp in (p0 + 1, p0 + 3):
            cases.append(CheckCase("norm_power", p0, q0, 1, "id", tolerance=LEMMA_TOL, param=mexp, **common))
            cases.append(CheckCase("vector_power", p0, q0, 1, "id", tolerance=LEMMA_TOL, param=mexp, **common))
    if "negative" in cfg.suites:
        cases.extend(negative_cases(p0, q0, **common))
    return cases


def negative_cases(p: int, q: int, **common) -> list[CheckCase]:
    """Corruptions of passing (corrected-form) checks; each must fail clearly."""
    space = PointSpace.vector(p, q)
    a = np.zeros(q)
    a[0] = 1.0
    b = np.ones(q) / np.sqrt(q)
    even_word = f"{Reflection(tuple(a)).word()} {Reflection(tuple(b)).word()} T[{','.join(['0.4'] * p)}] I"
    base = dict(form="corrected", negative=True, **common)
    out = [
        CheckCase("slice_G", p, q, 1, "I", perturbation="exponent+1", **base),
        CheckCase("slice_G", p, q, 1, even_word, perturbation="drop_reversion", **base),
        CheckCase("slice_G", p, q, 1, "I", perturbation="wrong_parity_weights", **base),
        CheckCase("dagger", p, q, 2, "I", **base),
    ]
    parse_word(even_word, space)
    return out


def _threads() -> int:
    env = os.environ.get("SLICE_GRAV_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_suite(cfg: SuiteConfig | None = None, cases: list[CheckCase] | None = None) -> list[CheckReport]:
    """Run every case; results are in case order and independent of threading."""
    cfg = cfg or SuiteConfig()
    if cases is None:
        cases = build_cases(cfg)
    if not cases:
        return []
    workers = min(_threads(), len(cases))
    if workers == 1:
        return [run_case(c, cfg.seed) for c in cases]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: run_case(c, cfg.seed), cases))


def summarize(reports: list[CheckReport]) -> dict:
    pos = [r for r in reports if not r.case.negative]
    neg = [r for r in reports if r.case.negative]
    return {
        "cases": len(reports),
        "positive": len(pos),
        "positive_passed": sum(r.passed for r in pos),
        "negative": len(neg),
        "negative_failed_correctly": sum(r.passed for r in neg),
        "errors": sum(r.error is not None for r in reports),
        "all_pass": all(r.passed for r in reports),
    }
