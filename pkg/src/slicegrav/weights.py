"""Intertwining weight functions for GRAV maps y = (ax+b)(cx+d)^{-1}.

Each identity has the shape

    Op_y^l f(y) = L(x) * Op_x^l [ R(x) f(phi(x)) ]

with a left weight value ``L`` and a right weight ``R`` that is needed as a
jet because the operator differentiates it.  Both are built from w = cx+d.

Two forms are provided:

``literal``
    The weights as commonly stated: the left factor is
    ``(w / |w|^k)^{-1}`` and the right factor uses the reversion of w.
``corrected``
    The left factor replaced by ``Delta * w * |w|^(k-2)``, where ``Delta`` is
    the scalar pseudo-determinant ``a rev(d) - b rev(c)`` (+-1).  For vector
    valued w this differs from the literal factor only by the sign
    ``-Delta``; for composite maps, where w is a general versor, it also fixes
    the multiplication order so that the weights form a cocycle.  The two
    forms coincide for translations and dilations.  For the paravector
    operator the left factor becomes ``Delta * (rev w)^{-1}``, which agrees
    with the literal ``w^{-1}`` whenever w is itself a paravector.

Even-l weights are scalars and are the same in both forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jetcalc import FunctionJet, jet_mul, jet_scalar_power
from .moebius import PointSpace, VahlenMatrix, affine_jet, embedded_jet, versor_jet_inverse

VARIANTS = ("odd_l", "even_l", "g_dagger", "paravector_corollary")
FORMS = ("literal", "corrected")
PERTURBATIONS = (None, "exponent+1", "drop_reversion", "wrong_parity_weights")


@dataclass(frozen=True)
class WeightSpec:
    variant: str
    l: int = 1
    form: str = "literal"
    perturbation: str | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown weight variant {self.variant!r}")
        if self.form not in FORMS:
            raise ValueError(f"unknown weight form {self.form!r}")
        if self.perturbation not in PERTURBATIONS:
            raise ValueError(f"unknown perturbation {self.perturbation!r}")
        if self.variant == "odd_l" and (self.l < 1 or self.l % 2 == 0):
            raise ValueError("odd_l weights need odd l >= 1")
        if self.variant == "even_l" and (self.l < 2 or self.l % 2):
            raise ValueError("even_l weights need even l >= 2")
        if self.variant in ("g_dagger", "paravector_corollary") and self.l != 1:
            raise ValueError(f"{self.variant} weights are defined for l = 1 only")

    @property
    def family(self) -> str:
        """Weight formula family after applying a parity swap."""
        if self.perturbation != "wrong_parity_weights":
            return self.variant
        if self.variant == "even_l":
            return "odd_l"
        return "even_l"


def pseudo_determinant_sign(M: VahlenMatrix) -> float:
    return float(np.sign(M.pseudo_determinant().coeffs[0]))


def _exponents(spec: WeightSpec, p: int) -> tuple[float, float]:
    """(right power of |w|, left power of |w| in the literal form)."""
    l = spec.l
    fam = spec.family
    if fam == "odd_l":
        right, left = -(p + 2 - l), p + 2 + l
    elif fam == "even_l":
        right, left = -(p + 1 - l), p + 1 + l
    elif fam == "g_dagger":
        right, left = -(p + 1), p - 1
    else:
        right, left = -2, 0
    if spec.perturbation == "exponent+1":
        left += 1
    return right, left


def _involution(spec: WeightSpec, alg, coeffs):
    if spec.perturbation == "drop_reversion":
        return coeffs
    if spec.family == "paravector_corollary":
        return alg.conjugate(coeffs)
    return alg.reverse(coeffs)


def cx_plus_d_jet(M: VahlenMatrix, space: PointSpace, x0, K: int) -> tuple[FunctionJet, FunctionJet]:
    """Jets of w = cx+d and of the scalar |w|^2."""
    w = affine_jet(M.c, M.d, embedded_jet(space, x0, K))
    _, n2 = versor_jet_inverse(w)
    return w, n2


def right_weight_jet(spec: WeightSpec, M: VahlenMatrix, space: PointSpace, x0, K: int) -> FunctionJet:
    w, n2 = cx_plus_d_jet(M, space, x0, K)
    right_pow, _ = _exponents(spec, space.p)
    scale = jet_scalar_power(n2, right_pow / 2.0)
    if spec.family == "even_l":
        return scale
    return jet_mul(w.like(_involution(spec, w.alg, w.coeffs)), scale)


def left_weight_value(spec: WeightSpec, M: VahlenMatrix, space: PointSpace, x0) -> np.ndarray:
    """Left factor at ``x0`` (batch axes allowed), as blade coefficients."""
    x0 = np.asarray(x0, dtype=float)
    alg = M.a.alg
    X = space.embed(x0)
    w = alg.product(M.c.coeffs, X) + M.d.coeffs
    n2 = alg.product(w, alg.conjugate(w))[..., :1]
    _, left_pow = _exponents(spec, space.p)
    if spec.family == "even_l":
        out = np.zeros(w.shape)
        out[..., :1] = n2 ** (left_pow / 2.0)
        return out
    if spec.form == "corrected":
        delta = pseudo_determinant_sign(M)
        if spec.family == "paravector_corollary":
            # Delta * (rev w)^{-1}; equals the literal factor when w is a paravector
            return delta * alg.conjugate(alg.reverse(w)) * n2 ** ((left_pow - 2) / 2.0)
        # Delta * w * |w|^(k-2), k the literal exponent
        return delta * w * n2 ** ((left_pow - 2) / 2.0)
    # (w / |w|^k)^{-1} = conj(w) |w|^(k-2)
    return alg.conjugate(w) * n2 ** ((left_pow - 2) / 2.0)


def weight_pair(spec: WeightSpec, M: VahlenMatrix, space: PointSpace, x0, K: int):
    return left_weight_value(spec, M, space, x0), right_weight_jet(spec, M, space, x0, K)
