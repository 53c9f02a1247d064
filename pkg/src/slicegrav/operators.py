"""Differential operators acting on jets.

Every operator consumes one order of the jet it is applied to.  Multiplier
jets such as x_q/|x_q|^2 are rebuilt at the working order of each application.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .clifford import AlgebraSignature, SingularityError
from .jetcalc import (
    FunctionJet,
    JetError,
    constant_jet,
    coordinate_jet,
    jet_mul,
    jet_partial,
    jet_reciprocal,
    scalar_constant_jet,
)

PARTS = ("p", "q", "full")


def _axes(f: FunctionJet, p: int, part: str) -> range:
    n = f.nvars
    if part == "p":
        return range(1, p + 1)
    if part == "q":
        return range(p + 1, n + 1)
    if part == "full":
        return range(1, n + 1)
    raise ValueError(f"unknown part {part!r}; expected one of {PARTS}")


def _require_order(f: FunctionJet, needed: int = 1):
    if f.order < needed:
        raise JetError(f"jet of order {f.order} cannot absorb {needed} more derivative(s)")


def _zero_like_lower(f: FunctionJet) -> FunctionJet:
    return constant_jet(np.zeros(f.coeffs.shape[:-2] + (1 << f.m,)), f.base_point, f.order - 1, f.m)


def _blade_of_axis(i: int) -> int:
    return 1 << (i - 1)


def apply_dirac(f: FunctionJet, p: int | None = None, part: str = "full") -> FunctionJet:
    """sum_i e_i d/dx_i over the selected axes (left multiplication)."""
    _require_order(f)
    out = _zero_like_lower(f).coeffs
    alg = f.alg
    for i in _axes(f, p or 0, part):
        d = jet_partial(f, i).coeffs
        out = out + alg.product(_unit(f.m, _blade_of_axis(i)), d)
    return FunctionJet(out, f.base_point, f.order - 1, f.m)


@functools.lru_cache(maxsize=None)
def _unit_cached(m: int, blade: int) -> np.ndarray:
    u = np.zeros(1 << m)
    u[blade] = 1.0
    u.setflags(write=False)
    return u


def _unit(m: int, blade: int) -> np.ndarray:
    return _unit_cached(m, blade)


def apply_euler(f: FunctionJet, p: int | None = None, part: str = "full") -> FunctionJet:
    """sum_i x_i d/dx_i over the selected axes."""
    _require_order(f)
    K = f.order - 1
    out = _zero_like_lower(f)
    for i in _axes(f, p or 0, part):
        out = out + jet_mul(coordinate_jet(i, f.base_point, K, f.m), jet_partial(f, i))
    return out


def laplacian(f: FunctionJet) -> FunctionJet:
    """Sum of unmixed second partials (order drops by two)."""
    _require_order(f, 2)
    out = None
    for i in range(1, f.nvars + 1):
        d2 = jet_partial(jet_partial(f, i), i)
        out = d2 if out is None else out + d2
    return out


def multiply_by(f: FunctionJet, g: FunctionJet, side: str = "left") -> FunctionJet:
    """Multiplication operator: g*f (left) or f*g (right)."""
    if side == "left":
        return jet_mul(g, f)
    if side == "right":
        return jet_mul(f, g)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


@dataclass
class OperatorContext:
    """Split R^{p+q} = R^p + R^q at a (batch of) base point(s).

    Builds and caches the multiplier jets the operators need, per order.
    """

    signature: AlgebraSignature
    base_point: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.signature.require_split()
        self.base_point = np.asarray(self.base_point, dtype=float)
        if self.base_point.shape[-1] != self.signature.m:
            raise ValueError(f"base point has {self.base_point.shape[-1]} coordinates, expected {self.signature.m}")

    @property
    def p(self) -> int:
        return self.signature.p

    @property
    def m(self) -> int:
        return self.signature.m

    def q_norm2(self) -> np.ndarray:
        return np.sum(self.base_point[..., self.p:] ** 2, axis=-1)

    def norm2(self) -> np.ndarray:
        return np.sum(self.base_point ** 2, axis=-1)

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def coordinate(self, i: int, K: int) -> FunctionJet:
        return self._memo(("x", i, K), lambda: coordinate_jet(i, self.base_point, K, self.m))

    def vector(self, K: int, part: str = "full") -> FunctionJet:
        """Jet of x, x_p or x_q as a grade-1 Clifford function."""

        def build():
            idx_axes = {"p": range(1, self.p + 1), "q": range(self.p + 1, self.m + 1), "full": range(1, self.m + 1)}[part]
            out = scalar_constant_jet(np.zeros(self.base_point.shape[:-1]), self.base_point, K, self.m)
            c = out.coeffs.copy()
            for i in idx_axes:
                c[..., _blade_of_axis(i)] += self.coordinate(i, K).coeffs[..., 0]
            return out.like(c)

        return self._memo(("vec", part, K), build)

    def norm2_jet(self, K: int, part: str = "full") -> FunctionJet:
        def build():
            axes = {"p": range(1, self.p + 1), "q": range(self.p + 1, self.m + 1), "full": range(1, self.m + 1)}[part]
            out = scalar_constant_jet(np.zeros(self.base_point.shape[:-1]), self.base_point, K, self.m)
            for i in axes:
                xi = self.coordinate(i, K)
                out = out + jet_mul(xi, xi)
            return out

        return self._memo(("n2", part, K), build)

    def slice_multiplier(self, K: int) -> FunctionJet:
        """Jet of x_q / |x_q|^2."""

        def build():
            if np.any(self.q_norm2() == 0.0):
                raise SingularityError("G is singular on R^p (|x_q| = 0)")
            return jet_mul(self.vector(K, "q"), jet_reciprocal(self.norm2_jet(K, "q")))

        return self._memo(("slice", K), build)


def _check_base(f: FunctionJet, ctx: OperatorContext):
    if f.base_point.shape != ctx.base_point.shape or not np.array_equal(f.base_point, ctx.base_point):
        raise JetError("jet and operator context use different base points")


def apply_G(f: FunctionJet, ctx: OperatorContext) -> FunctionJet:
    """G_x f = D_{x_p} f + (x_q/|x_q|^2) E_{x_q} f."""
    _require_order(f)
    _check_base(f, ctx)
    K = f.order - 1
    dp = apply_dirac(f, ctx.p, "p")
    eq = apply_euler(f, ctx.p, "q")
    return dp + jet_mul(ctx.slice_multiplier(K), eq)


def apply_G_iterated(f: FunctionJet, l: int, ctx: OperatorContext) -> FunctionJet:
    if l < 0:
        raise ValueError("iteration count must be nonnegative")
    _require_order(f, l)
    for _ in range(l):
        f = apply_G(f, ctx)
    return f


def apply_G_dagger(f: FunctionJet, ctx: OperatorContext) -> FunctionJet:
    """G^dagger_x f = |x_q|^2 D_{x_p} f + x_q E_{x_q} f; defined on all of R^{p+q}."""
    _require_order(f)
    _check_base(f, ctx)
    K = f.order - 1
    dp = apply_dirac(f, ctx.p, "p")
    eq = apply_euler(f, ctx.p, "q")
    return jet_mul(ctx.norm2_jet(K, "q"), dp) + jet_mul(ctx.vector(K, "q"), eq)


def apply_G_dagger_iterated(f: FunctionJet, l: int, ctx: OperatorContext) -> FunctionJet:
    _require_order(f, l)
    for _ in range(l):
        f = apply_G_dagger(f, ctx)
    return f


def paravector_vector_jet(f: FunctionJet, K: int) -> tuple[FunctionJet, FunctionJet]:
    """Jets of the vector part x_vec = sum_j x_j e_j and |x_vec|^2 in paravector coordinates.

    Coordinates are (x_0, x_1, ..., x_n) with x_0 the scalar axis, in Cl_n.
    """
    base = f.base_point
    zero = np.zeros(base.shape[:-1])
    vec = scalar_constant_jet(zero, base, K, f.m)
    c = vec.coeffs.copy()
    n2 = scalar_constant_jet(zero, base, K, f.m)
    for j in range(1, f.m + 1):
        xj = coordinate_jet(j + 1, base, K, f.m)
        c[..., _blade_of_axis(j)] += xj.coeffs[..., 0]
        n2 = n2 + jet_mul(xj, xj)
    return vec.like(c), n2


def apply_G_paravector(f: FunctionJet) -> FunctionJet:
    """G f = |x_vec|^2 d/dx_0 f + x_vec sum_{j>=1} x_j d/dx_j f on R + R^n."""
    _require_order(f)
    if f.nvars != f.m + 1:
        raise JetError(f"paravector jets need n+1 = {f.m + 1} variables, got {f.nvars}")
    K = f.order - 1
    vec, n2 = paravector_vector_jet(f, K)
    d0 = jet_partial(f, 1)
    euler = _zero_like_lower(f)
    for j in range(2, f.nvars + 1):
        euler = euler + jet_mul(coordinate_jet(j, f.base_point, K, f.m), jet_partial(f, j))
    return jet_mul(n2, d0) + jet_mul(vec, euler)


def apply_G_paravector_iterated(f: FunctionJet, l: int) -> FunctionJet:
    _require_order(f, l)
    for _ in range(l):
        f = apply_G_paravector(f)
    return f
