"""The Moebius subgroup GRAV generated by p-part translations, dilations,
q-sphere reflections and the inversion, as Vahlen matrices acting by
y = (a x + b)(c x + d)^{-1}.

Two point spaces are supported: R^{p+q} embedded as grade-1 elements of
Cl_{p+q}, and R + R^n embedded as paravectors of Cl_n.  In the paravector
space the scalar axis plays the role of the p-part.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .clifford import (
    AlgebraSignature,
    DomainError,
    Multivector,
    SingularityError,
    conjugate_inverse,
    geometric_product,
    reverse,
)
from .jetcalc import FunctionJet, JetError, constant_jet, coordinate_jet, jet_mul, jet_reciprocal

GRADE_TOL = 1e-9
DEFAULT_DELTA = 0.1
SAMPLE_BOX = 2.0
RETRY_BUDGET = 100_000


class SamplingError(RuntimeError):
    """Rejection sampling ran out of retries."""


@dataclass(frozen=True)
class PointSpace:
    """Embedding of R^nvars into Cl_m.

    ``kind`` is ``"vector"`` (R^p + R^q, coordinates on e_1..e_{p+q}) or
    ``"paravector"`` (R + R^n, coordinate 0 on the unit, the rest on e_1..e_n).
    """

    kind: str
    p: int
    q: int

    @classmethod
    def vector(cls, p: int, q: int) -> PointSpace:
        AlgebraSignature(p, q).require_split()
        return cls("vector", p, q)

    @classmethod
    def paravector(cls, n: int) -> PointSpace:
        if n < 1:
            raise ValueError("paravector space needs n >= 1")
        return cls("paravector", 1, n)

    @property
    def m(self) -> int:
        """Number of Clifford generators."""
        return self.p + self.q if self.kind == "vector" else self.q

    @property
    def nvars(self) -> int:
        return self.p + self.q

    @property
    def blades(self) -> np.ndarray:
        if self.kind == "vector":
            return 1 << np.arange(self.nvars)
        return np.concatenate([[0], 1 << np.arange(self.q)])

    @property
    def signature(self) -> AlgebraSignature:
        return AlgebraSignature(self.p, self.q)

    def embed(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (1 << self.m,))
        out[..., self.blades] = x
        return out

    def extract(self, coeffs, tol: float = GRADE_TOL) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        rest = coeffs.copy()
        rest[..., self.blades] = 0.0
        scale = np.maximum(np.linalg.norm(coeffs, axis=-1), 1e-300)
        if np.any(np.linalg.norm(rest, axis=-1) > tol * scale):
            raise DomainError("result leaves the point space beyond tolerance")
        return coeffs[..., self.blades]

    def q_norm(self, x) -> np.ndarray:
        return np.linalg.norm(np.asarray(x)[..., self.p:], axis=-1)


# ---------------------------------------------------------------- generators


@dataclass(frozen=True)
class Translation:
    b: tuple  # coordinates along the p-part

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))

    def word(self) -> str:
        return "T[" + ",".join(f"{v:g}" for v in self.b) + "]"


@dataclass(frozen=True)
class Dilation:
    lam: float

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("dilation factor must be nonzero")

    def word(self) -> str:
        return f"D[{self.lam:g}]"


@dataclass(frozen=True)
class Reflection:
    a: tuple  # unit vector in the q-part

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError(f"reflection vector {a} is not a unit vector")
        object.__setattr__(self, "a", a)

    def word(self) -> str:
        nz = [i for i, v in enumerate(self.a) if v != 0]
        if len(nz) == 1 and self.a[nz[0]] == 1.0:
            return f"R[q:{nz[0] + 1}]"
        return "R[" + ",".join(f"{v:.17g}" for v in self.a) + "]"


@dataclass(frozen=True)
class Inversion:
    def word(self) -> str:
        return "I"


Generator = Union[Translation, Dilation, Reflection, Inversion]


@dataclass(frozen=True)
class VahlenMatrix:
    a: Multivector
    b: Multivector
    c: Multivector
    d: Multivector

    @property
    def m(self) -> int:
        return self.a.m

    @classmethod
    def identity(cls, m: int) -> VahlenMatrix:
        one, zero = Multivector.scalar(m, 1.0), Multivector.scalar(m, 0.0)
        return cls(one, zero, zero, one)

    def __matmul__(self, o: VahlenMatrix) -> VahlenMatrix:
        g = geometric_product
        return VahlenMatrix(
            g(self.a, o.a) + g(self.b, o.c),
            g(self.a, o.b) + g(self.b, o.d),
            g(self.c, o.a) + g(self.d, o.c),
            g(self.c, o.b) + g(self.d, o.d),
        )

    def pseudo_determinant(self) -> Multivector:
        return geometric_product(self.a, reverse(self.d)) - geometric_product(self.b, reverse(self.c))

    def validate(self, tol: float = GRADE_TOL):
        """Vahlen conditions: pseudo-determinant +-1, a~b, c~d, ~ac, ~bd of grade <= 1."""
        pd = self.pseudo_determinant()
        if abs(abs(pd.coeffs[0]) - 1.0) > tol or np.linalg.norm(pd.coeffs[1:]) > tol:
            raise DomainError(f"pseudo-determinant is not +-1: {pd}")
        g = geometric_product
        for name, prod in (
            ("a~b", g(self.a, reverse(self.b))),
            ("c~d", g(self.c, reverse(self.d))),
            ("~ac", g(reverse(self.a), self.c)),
            ("~bd", g(reverse(self.b), self.d)),
        ):
            high = np.where(prod.alg.grades > 1, prod.coeffs, 0.0)
            if np.linalg.norm(high) > tol * max(prod.norm(), 1.0):
                raise DomainError(f"Vahlen condition violated: {name} has grade > 1 part")


def generator_to_vahlen(g: Generator, space: PointSpace) -> VahlenMatrix:
    m = space.m
    one, zero = Multivector.scalar(m, 1.0), Multivector.scalar(m, 0.0)
    if isinstance(g, Translation):
        if len(g.b) != space.p:
            raise ValueError(f"translation needs {space.p} p-part components")
        b = np.zeros(1 << m)
        b[space.blades[: space.p]] = g.b
        return VahlenMatrix(one, Multivector(m, b), zero, one)
    if isinstance(g, Dilation):
        return VahlenMatrix(Multivector.scalar(m, g.lam), zero, zero, Multivector.scalar(m, 1.0 / g.lam))
    if isinstance(g, Reflection):
        if len(g.a) != space.q:
            raise ValueError(f"reflection needs {space.q} q-part components")
        a = np.zeros(1 << m)
        a[space.blades[space.p:]] = g.a
        av = Multivector(m, a)
        return VahlenMatrix(av, zero, zero, conjugate_inverse(av))
    if isinstance(g, Inversion):
        return VahlenMatrix(zero, one, -one, zero)
    raise TypeError(f"not a GRAV generator: {g!r}")


def generator_action(g: Generator, space: PointSpace, x) -> np.ndarray:
    """Point action of one generator by coordinate formulas (no Vahlen matrices)."""
    x = np.asarray(x, dtype=float)
    if isinstance(g, Translation):
        y = x.copy()
        y[..., : space.p] += g.b
        return y
    if isinstance(g, Dilation):
        return g.lam ** 2 * x
    if isinstance(g, Reflection):
        a = np.zeros(space.nvars)
        a[space.p:] = g.a
        # the matrix (a, 0; 0, a^{-1}) induces y = a x a = x - 2 (a.x) a,
        # which also flips the sign of a scalar component
        y = x - 2.0 * (x @ a)[..., None] * a
        if space.kind == "paravector":
            y[..., 0] = -x[..., 0]
        return y
    if isinstance(g, Inversion):
        n2 = np.sum(x ** 2, axis=-1, keepdims=True)
        y = x / n2
        if space.kind == "paravector":
            y[..., 0] = -y[..., 0]
        return y
    raise TypeError(f"not a GRAV generator: {g!r}")


@dataclass(frozen=True)
class GeneratorWord:
    """Ordered generators; the word (g1, g2, g3) denotes the map g1 o g2 o g3."""

    generators: tuple
    space: PointSpace

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    def __str__(self):
        return " ".join(g.word() for g in self.generators) or "id"

    def matrix(self) -> VahlenMatrix:
        return compose(self)

    def act(self, x) -> np.ndarray:
        for g in reversed(self.generators):
            x = generator_action(g, self.space, x)
        return x


def compose(word: GeneratorWord) -> VahlenMatrix:
    M = VahlenMatrix.identity(word.space.m)
    for g in word.generators:
        M = M @ generator_to_vahlen(g, word.space)
    M.validate()
    return M


_TOKEN = re.compile(r"([TDRI])(?:\[([^\]]*)\])?")


def parse_word(text: str, space: PointSpace) -> GeneratorWord:
    """Inverse of ``str(word)``: e.g. ``"T[0.3,0] D[1.7] R[q:1] I"``."""
    gens = []
    text = text.strip()
    if text in ("", "id"):
        return GeneratorWord((), space)
    for tok in text.split():
        mt = _TOKEN.fullmatch(tok)
        if not mt:
            raise ValueError(f"cannot parse generator {tok!r}")
        kind, arg = mt.groups()
        if kind == "I":
            gens.append(Inversion())
        elif kind == "D":
            gens.append(Dilation(float(arg)))
        elif kind == "T":
            gens.append(Translation([float(v) for v in arg.split(",")]))
        elif arg.startswith("q:"):
            a = [0.0] * space.q
            a[int(arg[2:]) - 1] = 1.0
            gens.append(Reflection(a))
        else:
            gens.append(Reflection([float(v) for v in arg.split(",")]))
    return GeneratorWord(tuple(gens), space)


# ---------------------------------------------------------------- evaluation


def _affine(M_left: Multivector, M_right: Multivector, X: np.ndarray, alg) -> np.ndarray:
    return alg.product(M_left.coeffs, X) + M_right.coeffs


def evaluate_point(M: VahlenMatrix, space: PointSpace, x, tol: float = GRADE_TOL) -> np.ndarray:
    """Coordinates of (a x + b)(c x + d)^{-1}; ``x`` may carry batch axes."""
    X = space.embed(x)
    alg = M.a.alg
    num = _affine(M.a, M.b, X, alg)
    den = _affine(M.c, M.d, X, alg)
    bar = alg.conjugate(den)
    n2 = alg.product(den, bar)
    s = n2[..., 0]
    if np.any(s <= 1e-300):
        raise SingularityError("c x + d vanishes")
    if np.any(np.linalg.norm(n2[..., 1:], axis=-1) > tol * s):
        raise DomainError("c x + d is not a versor")
    y = alg.product(num, bar / s[..., None])
    return space.extract(y, tol)


def cx_plus_d_norm(M: VahlenMatrix, space: PointSpace, x) -> np.ndarray:
    den = _affine(M.c, M.d, space.embed(x), M.a.alg)
    return np.linalg.norm(den, axis=-1)


@dataclass(frozen=True, eq=False)
class MapJet:
    coords: tuple  # scalar FunctionJets y_1..y_n
    y0: np.ndarray


def embedded_jet(space: PointSpace, x0, K: int) -> FunctionJet:
    """Clifford-valued jet of the identity map x -> x (vector or paravector)."""
    x0 = np.asarray(x0, dtype=float)
    out = constant_jet(np.zeros(x0.shape[:-1] + (1 << space.m,)), x0, K, space.m)
    c = out.coeffs.copy()
    for i, blade in enumerate(space.blades):
        c[..., blade] += coordinate_jet(i + 1, x0, K, space.m).coeffs[..., 0]
    return out.like(c)


def affine_jet(left: Multivector, right: Multivector, X: FunctionJet) -> FunctionJet:
    """Jet of left * x + right."""
    lj = constant_jet(left.coeffs, X.base_point, X.order, X.m)
    rj = constant_jet(right.coeffs, X.base_point, X.order, X.m)
    return jet_mul(lj, X) + rj


def versor_jet_inverse(w: FunctionJet, tol: float = GRADE_TOL) -> tuple[FunctionJet, FunctionJet]:
    """(w^{-1}, |w|^2) for a jet whose values are versors, via w^{-1} = conj(w)/|w|^2."""
    bar = w.like(w.alg.conjugate(w.coeffs))
    n2 = jet_mul(w, bar)
    scale = np.max(np.abs(n2.coeffs[..., 0]))
    if np.max(np.abs(n2.coeffs[..., 1:]), initial=0.0) > tol * max(scale, 1.0):
        raise DomainError("w conj(w) is not scalar; not a versor-valued function")
    s = np.zeros_like(n2.coeffs)
    s[..., 0] = n2.coeffs[..., 0]
    n2 = n2.like(s)
    if np.any(n2.coeffs[..., 0, 0] <= 0):
        raise SingularityError("c x + d vanishes at the base point")
    return jet_mul(bar, jet_reciprocal(n2)), n2


def evaluate_map_jet(M: VahlenMatrix, space: PointSpace, x0, K: int) -> MapJet:
    X = embedded_jet(space, x0, K)
    num = affine_jet(M.a, M.b, X)
    den = affine_jet(M.c, M.d, X)
    inv, _ = versor_jet_inverse(den)
    Y = jet_mul(num, inv)
    rest = Y.coeffs.copy()
    rest[..., space.blades] = 0.0
    scale = max(float(np.max(np.abs(Y.coeffs))), 1.0)
    if np.max(np.abs(rest)) > GRADE_TOL * scale:
        raise DomainError("map jet leaves the point space")
    coords = []
    for blade in space.blades:
        c = np.zeros_like(Y.coeffs)
        c[..., 0] = Y.coeffs[..., blade]
        coords.append(Y.like(c))
    y0 = Y.coeffs[..., 0, space.blades]
    return MapJet(tuple(coords), y0)


def sample_valid_point(
    M: VahlenMatrix,
    space: PointSpace,
    delta: float,
    rng: np.random.Generator,
    budget: int = RETRY_BUDGET,
    box: float = SAMPLE_BOX,
) -> np.ndarray:
    """Uniform point of [-box, box]^n with |x_q|, |cx+d| and |phi(x)_q| all >= delta."""
    if delta <= 0:
        raise ValueError("clearance delta must be positive")
    for _ in range(budget):
        x = rng.uniform(-box, box, space.nvars)
        if space.q_norm(x) < delta or cx_plus_d_norm(M, space, x) < delta:
            continue
        try:
            y = evaluate_point(M, space, x)
        except (SingularityError, DomainError):
            continue
        if space.q_norm(y) >= delta:
            return x
    raise SamplingError(f"no valid point after {budget} draws")
