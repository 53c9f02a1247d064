"""Dense real Clifford algebra with negative-definite signature (e_i^2 = -1).

Blades are indexed by bitmask: bit ``i`` set means generator ``e_{i+1}`` is a
factor, generators in ascending order.  Coefficient arrays carry the blade axis
last, so every array routine here broadcasts over leading batch axes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

MAX_GENERATORS = 8
VERSOR_TOL = 1e-9


class CliffordError(ValueError):
    """Invalid use of the algebra (signature mismatch, bad grade, ...)."""


class SingularityError(ArithmeticError):
    """Inversion of a zero (or numerically zero) element."""


class DomainError(ArithmeticError):
    """Input is not of the kind an operation requires (e.g. not a versor)."""


@dataclass(frozen=True)
class AlgebraSignature:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise CliffordError(f"negative split dimensions ({self.p}, {self.q})")
        if self.m > MAX_GENERATORS:
            raise CliffordError(f"p+q={self.m} exceeds the maximum of {MAX_GENERATORS}")

    @property
    def m(self) -> int:
        return self.p + self.q

    def require_split(self):
        if self.p < 1 or self.q < 1:
            raise CliffordError("slice operators need p >= 1 and q >= 1")


def _reorder_sign(a: int, b: int) -> int:
    """Sign of moving the generators of blade ``b`` past those of blade ``a``."""
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


class Algebra:
    """Cayley data for Cl_m.  Obtain instances through :func:`algebra`."""

    def __init__(self, m: int):
        if not 0 <= m <= MAX_GENERATORS:
            raise CliffordError(f"unsupported number of generators: {m}")
        self.m = m
        self.nblades = 1 << m
        n = self.nblades
        idx = np.arange(n)
        self.grades = np.array([bin(i).count("1") for i in range(n)])
        sign = np.empty((n, n), dtype=np.int8)
        for i in range(n):
            for j in range(n):
                s = _reorder_sign(i, j)
                if bin(i & j).count("1") & 1:
                    s = -s
                sign[i, j] = s
        self.sign = sign
        # product coefficient k gets a_i * b_{i^k} * sign[i, i^k]
        self.partner = idx[:, None] ^ idx[None, :]
        self.partner_sign = np.take_along_axis(sign, self.partner, axis=1).astype(float)
        g = self.grades
        self.reverse_sign = np.where((g * (g - 1) // 2) % 2, -1.0, 1.0)
        self.conjugate_sign = np.where((g * (g + 1) // 2) % 2, -1.0, 1.0)
        self.sign.setflags(write=False)

    def __repr__(self):
        return f"Algebra(m={self.m})"

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Geometric product of coefficient arrays, broadcasting leading axes."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.zeros(shape)
        lead = tuple(range(a.ndim - 1))
        active = np.flatnonzero(np.any(a != 0, axis=lead)) if lead else np.flatnonzero(a)
        for i in active:
            out += a[..., i, None] * (b[..., self.partner[i]] * self.partner_sign[i])
        return out

    def reverse(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, dtype=float) * self.reverse_sign

    def conjugate(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, dtype=float) * self.conjugate_sign

    def grade_mask(self, k: int) -> np.ndarray:
        return self.grades == k

    def blade_name(self, i: int) -> str:
        if i == 0:
            return "1"
        return "e" + "".join(str(j + 1) for j in range(self.m) if i >> j & 1)


@functools.lru_cache(maxsize=None)
def algebra(m: int) -> Algebra:
    return Algebra(m)


class Multivector:
    """Immutable element of Cl_m."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, m: int, coeffs=None):
        object.__setattr__(self, "alg", algebra(m))
        if coeffs is None:
            c = np.zeros(self.alg.nblades)
        else:
            c = np.array(coeffs, dtype=float)
            if c.shape != (self.alg.nblades,):
                raise CliffordError(f"expected {self.alg.nblades} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @property
    def m(self) -> int:
        return self.alg.m

    @classmethod
    def scalar(cls, m: int, value: float) -> Multivector:
        c = np.zeros(1 << m)
        c[0] = value
        return cls(m, c)

    @classmethod
    def blade(cls, m: int, *generators: int, value: float = 1.0) -> Multivector:
        """``blade(m, 1, 2)`` is e1 e2; generators are 1-based and must be distinct."""
        if len(set(generators)) != len(generators):
            raise CliffordError("repeated generator in blade")
        mask, sign = 0, 1
        for g in generators:
            if not 1 <= g <= m:
                raise CliffordError(f"generator e{g} outside Cl_{m}")
            bit = 1 << (g - 1)
            sign *= _reorder_sign(mask, bit)
            mask |= bit
        c = np.zeros(1 << m)
        c[mask] = sign * value
        return cls(m, c)

    @classmethod
    def vector(cls, m: int, components) -> Multivector:
        comps = np.asarray(components, dtype=float)
        if comps.shape != (m,):
            raise CliffordError(f"vector needs {m} components")
        c = np.zeros(1 << m)
        c[1 << np.arange(m)] = comps
        return cls(m, c)

    def _check(self, other: Multivector):
        if other.m != self.m:
            raise CliffordError(f"signature mismatch: Cl_{self.m} vs Cl_{other.m}")

    def _coerce(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return other
        if np.isscalar(other):
            return Multivector.scalar(self.m, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.m, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Multivector(self.m, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(self.m, -self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return Multivector(self.m, self.coeffs * float(other))
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Multivector(self.m, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return Multivector(self.m, self.coeffs / float(other))
        return NotImplemented

    def __eq__(self, other):
        return isinstance(other, Multivector) and other.m == self.m and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def allclose(self, other, rtol=1e-12, atol=1e-12) -> bool:
        other = self._coerce(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def vector_part(self) -> np.ndarray:
        return self.coeffs[1 << np.arange(self.m)].copy()

    def norm(self) -> float:
        """Euclidean norm over all blade coefficients."""
        return float(np.linalg.norm(self.coeffs))

    def reverse(self) -> Multivector:
        return reverse(self)

    def conjugate(self) -> Multivector:
        return conjugate(self)

    def grade(self, k: int) -> Multivector:
        return grade_project(self, k)

    def __repr__(self):
        terms = [f"{v:+.6g}*{self.alg.blade_name(i)}" for i, v in enumerate(self.coeffs) if v != 0]
        return f"Multivector(Cl_{self.m}: {' '.join(terms) or '0'})"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    if a.m != b.m:
        raise CliffordError(f"signature mismatch: Cl_{a.m} vs Cl_{b.m}")
    return Multivector(a.m, a.alg.product(a.coeffs, b.coeffs))


def reverse(a: Multivector) -> Multivector:
    return Multivector(a.m, a.alg.reverse(a.coeffs))


def conjugate(a: Multivector) -> Multivector:
    return Multivector(a.m, a.alg.conjugate(a.coeffs))


def grade_project(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= a.m:
        raise CliffordError(f"grade {k} outside 0..{a.m}")
    return Multivector(a.m, np.where(a.alg.grade_mask(k), a.coeffs, 0.0))


def is_vector(a: Multivector, tol: float = 0.0) -> bool:
    off = np.where(a.alg.grade_mask(1), 0.0, a.coeffs)
    return bool(np.linalg.norm(off) <= tol * max(a.norm(), 1.0))


def vector_norm_squared(v: Multivector) -> float:
    """|v|^2 = scalar part of -v*v for grade-1 ``v``."""
    return float(-geometric_product(v, v).coeffs[0])


def vector_inverse(v: Multivector) -> Multivector:
    if not is_vector(v):
        raise DomainError("vector_inverse expects a grade-1 element")
    n2 = float(np.sum(v.coeffs ** 2))
    if n2 == 0.0:
        raise SingularityError("inverse of the zero vector")
    return Multivector(v.m, -v.coeffs / n2)


def _scalar_split(w: Multivector, involuted: Multivector) -> float:
    prod = geometric_product(w, involuted).coeffs
    s = float(prod[0])
    rest = float(np.linalg.norm(prod[1:]))
    if s == 0.0:
        raise SingularityError("element has zero norm")
    if rest > VERSOR_TOL * abs(s):
        raise DomainError(f"not a versor: non-scalar residue {rest:.3g} vs scalar {s:.3g}")
    return s


def versor_inverse(w: Multivector) -> Multivector:
    """Inverse of a product of vectors, w^-1 = reverse(w) / (w reverse(w)).

    For a product of k vectors, w reverse(w) = (-1)^k |w|^2, so the scalar may
    be negative; only its being a nonzero scalar matters.
    """
    rev = reverse(w)
    return rev / _scalar_split(w, rev)


def conjugate_inverse(w: Multivector) -> Multivector:
    """Inverse via Clifford conjugation; also covers products of paravectors."""
    bar = conjugate(w)
    return bar / _scalar_split(w, bar)


def versor_norm(w: Multivector) -> float:
    """sqrt(w conj(w)); equals the product of the factor lengths."""
    s = _scalar_split(w, conjugate(w)) if np.any(w.coeffs) else 0.0
    if s < 0:
        raise DomainError("w conj(w) is negative; not a product of vectors")
    return math.sqrt(s)
