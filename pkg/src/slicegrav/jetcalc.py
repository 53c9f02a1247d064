"""Truncated multivariate Taylor arithmetic with Clifford-valued coefficients.

A :class:`FunctionJet` stores ``coeffs[..., k, :]`` = d^alpha f(x0) / alpha!
for the k-th multi-index alpha in graded-lexicographic order.  Because the
order is graded, the jet of order K-1 is a prefix of the jet of order K.
Leading axes of ``coeffs`` and ``base_point`` are batch axes: one jet object
can hold expansions of many functions at many points.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .clifford import Algebra, CliffordError, algebra


class JetError(ValueError):
    """Incompatible jets or exhausted derivative order."""


def _compositions(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest


class JetIndex:
    """Multi-index bookkeeping for ``n`` variables up to total order ``K``."""

    def __init__(self, n: int, K: int):
        self.n, self.K = n, K
        alphas = [a for t in range(K + 1) for a in _compositions(n, t)]
        self.alphas = np.array(alphas, dtype=int).reshape(len(alphas), n)
        self.size = len(alphas)
        self.position = {a: k for k, a in enumerate(alphas)}
        self.totals = self.alphas.sum(axis=1)
        self.factorials = np.array([math.prod(math.factorial(e) for e in a) for a in alphas], dtype=float)

        ia, ib, ic = [], [], []
        for i, a in enumerate(alphas):
            ta = sum(a)
            for j, b in enumerate(alphas):
                if ta + self.totals[j] > K:
                    # graded order: every later b is at least as long
                    break
                ia.append(i)
                ib.append(j)
                ic.append(self.position[tuple(x + y for x, y in zip(a, b))])
        self.pair_a = np.array(ia, dtype=int)
        self.pair_b = np.array(ib, dtype=int)
        self.pair_sum = sp.csr_matrix(
            (np.ones(len(ic)), (np.array(ic, dtype=int), np.arange(len(ic)))), shape=(self.size, len(ic))
        )

        # d/dx_i: new coefficient alpha (|alpha| <= K-1) reads alpha + e_i
        lower = len([a for a in alphas if sum(a) <= K - 1]) if K > 0 else 0
        self.lower_size = lower
        self.shift = np.zeros((n, lower), dtype=int)
        self.shift_factor = np.zeros((n, lower))
        for i in range(n):
            for k in range(lower):
                a = list(alphas[k])
                self.shift_factor[i, k] = a[i] + 1
                a[i] += 1
                self.shift[i, k] = self.position[tuple(a)]

    def index(self, alpha: Sequence[int]) -> int:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.n:
            raise JetError(f"multi-index {alpha} needs length {self.n}")
        try:
            return self.position[alpha]
        except KeyError:
            raise JetError(f"multi-index {alpha} exceeds order {self.K}") from None


@functools.lru_cache(maxsize=None)
def jet_index(n: int, K: int) -> JetIndex:
    return JetIndex(n, K)


def multi_indices(n: int, K: int) -> np.ndarray:
    """All multi-indices of ``n`` variables with total <= K, graded-lex order."""
    return jet_index(n, K).alphas.copy()


def _cauchy(idx: JetIndex, prod: np.ndarray) -> np.ndarray:
    """Sum pairwise products (axis -2 enumerates pairs) into coefficient slots."""
    moved = np.moveaxis(prod, -2, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = idx.pair_sum @ flat
    return np.moveaxis(out.reshape((idx.size,) + moved.shape[1:]), 0, -2)


@dataclass(frozen=True, eq=False)
class FunctionJet:
    """Taylor jet of a Cl_m-valued function of ``nvars`` real variables."""

    coeffs: np.ndarray  # (*batch, N, 2^m)
    base_point: np.ndarray  # (*batch, nvars)
    order: int
    m: int

    def __post_init__(self):
        idx = jet_index(self.nvars, self.order)
        if self.coeffs.shape[-2:] != (idx.size, 1 << self.m):
            raise JetError(f"coefficient shape {self.coeffs.shape} does not fit order {self.order}, Cl_{self.m}")

    @property
    def nvars(self) -> int:
        return self.base_point.shape[-1]

    @property
    def index(self) -> JetIndex:
        return jet_index(self.nvars, self.order)

    @property
    def alg(self) -> Algebra:
        return algebra(self.m)

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[:-2]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[..., 0, :]

    def coeff(self, alpha) -> np.ndarray:
        return self.coeffs[..., self.index.index(alpha), :]

    def derivative(self, alpha) -> np.ndarray:
        k = self.index.index(alpha)
        return self.coeffs[..., k, :] * self.index.factorials[k]

    def is_scalar(self) -> bool:
        return not np.any(self.coeffs[..., 1:])

    def truncate(self, K: int) -> FunctionJet:
        if K > self.order:
            raise JetError(f"cannot raise order {self.order} to {K}")
        n = jet_index(self.nvars, K).size
        return FunctionJet(self.coeffs[..., :n, :], self.base_point, K, self.m)

    def like(self, coeffs) -> FunctionJet:
        return FunctionJet(coeffs, self.base_point, self.order, self.m)

    def __add__(self, other):
        if isinstance(other, FunctionJet):
            return jet_add(self, other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, FunctionJet):
            return jet_add(self, jet_scale(other, -1.0))
        return NotImplemented

    def __neg__(self):
        return jet_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, FunctionJet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    def __rmul__(self, other):
        return jet_scale(self, other)


def _check_pair(a: FunctionJet, b: FunctionJet):
    if a.order != b.order:
        raise JetError(f"order mismatch: {a.order} vs {b.order}")
    if a.m != b.m:
        raise CliffordError(f"signature mismatch: Cl_{a.m} vs Cl_{b.m}")
    if a.base_point.shape != b.base_point.shape or not np.array_equal(a.base_point, b.base_point):
        raise JetError("jets expanded at different base points")


def constant_jet(value, base_point, K: int, m: int) -> FunctionJet:
    """Jet of a constant multivector (or batch of them)."""
    base_point = np.asarray(base_point, dtype=float)
    idx = jet_index(base_point.shape[-1], K)
    value = np.asarray(value, dtype=float)
    batch = np.broadcast_shapes(base_point.shape[:-1], value.shape[:-1])
    coeffs = np.zeros(batch + (idx.size, 1 << m))
    coeffs[..., 0, :] = value
    return FunctionJet(coeffs, np.broadcast_to(base_point, batch + base_point.shape[-1:]), K, m)


def scalar_constant_jet(value, base_point, K: int, m: int) -> FunctionJet:
    v = np.zeros(np.shape(value) + (1 << m,))
    v[..., 0] = value
    return constant_jet(v, base_point, K, m)


def coordinate_jet(i: int, x0, K: int, m: int | None = None) -> FunctionJet:
    """Jet of the coordinate function x_i (1-based) at ``x0``."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.shape[-1]
    m = n if m is None else m
    if not 1 <= i <= n:
        raise JetError(f"coordinate index {i} outside 1..{n}")
    idx = jet_index(n, K)
    coeffs = np.zeros(x0.shape[:-1] + (idx.size, 1 << m))
    coeffs[..., 0, 0] = x0[..., i - 1]
    if K >= 1:
        unit = [0] * n
        unit[i - 1] = 1
        coeffs[..., idx.index(unit), 0] = 1.0
    return FunctionJet(coeffs, x0, K, m)


def jet_add(a: FunctionJet, b: FunctionJet) -> FunctionJet:
    _check_pair(a, b)
    return a.like(a.coeffs + b.coeffs)


def jet_scale(a: FunctionJet, s) -> FunctionJet:
    """Multiply by a real scalar (or a batch of them, broadcast over leading axes)."""
    s = np.asarray(s, dtype=float)
    return a.like(a.coeffs * s[..., None, None])


def jet_mul(a: FunctionJet, b: FunctionJet) -> FunctionJet:
    """Truncated Cauchy product; coefficient products in the order a*b."""
    _check_pair(a, b)
    idx = a.index
    left = a.coeffs[..., idx.pair_a, :]
    right = b.coeffs[..., idx.pair_b, :]
    if a.is_scalar():
        prod = left[..., :1] * right
    elif b.is_scalar():
        prod = left * right[..., :1]
    else:
        prod = a.alg.product(left, right)
    return a.like(_cauchy(idx, prod))


def scalar_part(a: FunctionJet) -> FunctionJet:
    c = np.zeros_like(a.coeffs)
    c[..., 0] = a.coeffs[..., 0]
    return a.like(c)


def jet_map_coeffs(a: FunctionJet, fn: Callable[[np.ndarray], np.ndarray]) -> FunctionJet:
    """Apply a linear blade-wise map (reverse, conjugate, grade projection)."""
    return a.like(fn(a.coeffs))


def _scalar_series(u: FunctionJet, series: np.ndarray) -> FunctionJet:
    """Compose sum_k series[..., k] (u - u0)^k with the scalar jet ``u``."""
    idx = u.index
    delta = u.coeffs[..., 0].copy()
    delta[..., 0] = 0.0
    result = np.zeros(delta.shape)
    result[..., 0] = series[..., u.order]
    for k in range(u.order - 1, -1, -1):
        prod = result[..., idx.pair_a] * delta[..., idx.pair_b]
        result = _cauchy(idx, prod[..., None])[..., 0]
        result[..., 0] += series[..., k]
    coeffs = np.zeros(u.coeffs.shape)
    coeffs[..., 0] = result
    return u.like(coeffs)


def _require_scalar(u: FunctionJet):
    if not u.is_scalar():
        raise JetError("operation needs a scalar-valued jet")


def jet_scalar_power(u: FunctionJet, alpha: float) -> FunctionJet:
    """u^alpha for a scalar jet with positive value, via the binomial series."""
    _require_scalar(u)
    u0 = u.coeffs[..., 0, 0]
    if np.any(u0 <= 0):
        raise JetError("real power needs a positive base value")
    K = u.order
    series = np.empty(u0.shape + (K + 1,))
    binom = 1.0
    for k in range(K + 1):
        series[..., k] = binom * u0 ** (alpha - k)
        binom *= (alpha - k) / (k + 1)
    return _scalar_series(u, series)


def jet_reciprocal(u: FunctionJet) -> FunctionJet:
    """1/u for a scalar jet with positive value."""
    return jet_scalar_power(u, -1.0)


def jet_partial(f: FunctionJet, i: int) -> FunctionJet:
    """d/dx_i (1-based); the result has order one less."""
    if f.order < 1:
        raise JetError("cannot differentiate an order-0 jet")
    if not 1 <= i <= f.nvars:
        raise JetError(f"axis {i} outside 1..{f.nvars}")
    idx = f.index
    c = f.coeffs[..., idx.shift[i - 1], :] * idx.shift_factor[i - 1][:, None]
    return FunctionJet(c, f.base_point, f.order - 1, f.m)


@dataclass(frozen=True, eq=False)
class PolynomialFunction:
    """Clifford-coefficient polynomial sum_gamma coeffs[gamma] x^gamma.

    ``coeffs[..., k, :]`` belongs to the k-th multi-index of
    ``multi_indices(nvars, degree)``; leading axes are a batch of polynomials.
    Monomials are real, so left and right coefficients coincide.
    """

    coeffs: np.ndarray
    nvars: int
    degree: int
    m: int

    def __post_init__(self):
        if self.coeffs.shape[-2:] != (jet_index(self.nvars, self.degree).size, 1 << self.m):
            raise JetError(f"polynomial coefficients of shape {self.coeffs.shape} do not fit")

    @classmethod
    def from_terms(cls, terms, nvars: int, m: int) -> PolynomialFunction:
        """Build from ``[(exponents, multivector_coeffs), ...]``."""
        terms = [(tuple(int(e) for e in a), np.asarray(c, dtype=float)) for a, c in terms]
        degree = max((sum(a) for a, _ in terms), default=0)
        idx = jet_index(nvars, degree)
        coeffs = np.zeros((idx.size, 1 << m))
        for a, c in terms:
            coeffs[idx.index(a)] += c
        return cls(coeffs, nvars, degree, m)

    @property
    def terms(self):
        alphas = jet_index(self.nvars, self.degree).alphas
        return [(tuple(a), self.coeffs[..., k, :]) for k, a in enumerate(alphas) if np.any(self.coeffs[..., k, :])]

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        alphas = jet_index(self.nvars, self.degree).alphas
        mono = np.prod(x[..., None, :] ** alphas, axis=-1)
        return np.einsum("...g,...gb->...b", mono, self.coeffs)


def compose_polynomial_with_coordinates(f: PolynomialFunction, y_coords: Sequence[FunctionJet]) -> FunctionJet:
    """Jet of f(y_1(x), ..., y_n(x)) from scalar coordinate jets."""
    if len(y_coords) != f.nvars:
        raise JetError(f"need {f.nvars} coordinate jets, got {len(y_coords)}")
    first = y_coords[0]
    for y in y_coords:
        _check_pair(first, y)
        _require_scalar(y)
    idx = first.index
    ys = [y.coeffs[..., 0] for y in y_coords]
    alphas = jet_index(f.nvars, f.degree).alphas
    one = np.zeros(ys[0].shape)
    one[..., 0] = 1.0
    monos = [one]
    for a in alphas[1:]:
        j = int(np.flatnonzero(a)[-1])
        prev = a.copy()
        prev[j] -= 1
        base = monos[jet_index(f.nvars, f.degree).index(prev)]
        prod = base[..., idx.pair_a] * ys[j][..., idx.pair_b]
        monos.append(_cauchy(idx, prod[..., None])[..., 0])
    mono = np.stack(monos, axis=-2)  # (*batch, G, N)
    coeffs = np.einsum("...gn,...gb->...nb", mono, f.coeffs)
    return FunctionJet(coeffs, first.base_point, first.order, f.m)


def polynomial_to_jet(f: PolynomialFunction, x0, K: int) -> FunctionJet:
    x0 = np.asarray(x0, dtype=float)
    coords = [coordinate_jet(i, x0, K, f.m) for i in range(1, f.nvars + 1)]
    return compose_polynomial_with_coordinates(f, coords)


_STENCILS = {
    0: ([0], [1.0]),
    1: ([-1, 1], [-0.5, 0.5]),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
}


def finite_difference_oracle(f: Callable[[np.ndarray], np.ndarray], x0, alpha) -> np.ndarray:
    """Central-difference estimate of d^alpha f(x0), |alpha| <= 3.

    Steps are 1e-4 for |alpha| <= 2 and 1e-3 for |alpha| = 3; accuracy is
    O(h^2) plus roundoff of order eps / h^|alpha|.
    """
    x0 = np.asarray(x0, dtype=float)
    alpha = [int(a) for a in alpha]
    total = sum(alpha)
    if total > 3:
        raise JetError("finite differences support total order <= 3")
    h = 1e-4 if total <= 2 else 1e-3
    axes = [(i, _STENCILS[a]) for i, a in enumerate(alpha) if a]
    acc = 0.0
    for choice in itertools.product(*[list(zip(*st)) for _, st in axes]):
        x = x0.copy()
        w = 1.0
        for (i, _), (off, weight) in zip(axes, choice):
            x[i] += off * h
            w *= weight
        acc = acc + w * np.asarray(f(x), dtype=float)
    return acc / h ** total
