import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from slicegrav.clifford import AlgebraSignature, CliffordError, SingularityError, algebra
from slicegrav.jetcalc import JetError, PolynomialFunction, jet_index, jet_mul, polynomial_to_jet
from slicegrav.operators import (
    OperatorContext,
    apply_dirac,
    apply_euler,
    apply_G,
    apply_G_dagger,
    apply_G_iterated,
    apply_G_paravector,
    laplacian,
    multiply_by,
)
from oracles import evaluate, sym_G, symbolic_polynomial, symbols


def rational_poly(rng, nvars, degree, m, max_grade=2):
    idx = jet_index(nvars, degree)
    c = rng.integers(-4, 5, (idx.size, 1 << m)) / 4.0
    c[:, algebra(m).grades > max_grade] = 0.0
    return PolynomialFunction(c, nvars, degree, m)


@pytest.mark.parametrize("p,q", [(1, 2), (2, 1)])
def test_G_matches_symbolic_oracle(p, q):
    m = p + q
    rng = np.random.default_rng(p * 10 + q)
    f = rational_poly(rng, m, 3, m)
    x0 = np.array([0.5, -0.75, 1.25])
    xs = symbols(m)
    exprs = symbolic_polynomial(f.coeffs, jet_index(m, 3).alphas, xs)
    g1 = sym_G(exprs, xs, p, m)
    g2 = sym_G(g1, xs, p, m)
    ctx = OperatorContext(AlgebraSignature(p, q), x0)
    jet = polynomial_to_jet(f, x0, 2)
    np.testing.assert_allclose(apply_G(jet, ctx).value, evaluate(g1, xs, x0), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(apply_G_iterated(jet, 2, ctx).value, evaluate(g2, xs, x0), rtol=1e-12, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_dirac_squares_to_minus_laplacian(seed, m):
    rng = np.random.default_rng(seed)
    f = polynomial_to_jet(rational_poly(rng, m, 4, m), rng.uniform(-1, 1, m), 2)
    dd = apply_dirac(apply_dirac(f))
    np.testing.assert_allclose(dd.value, -laplacian(f).value, atol=1e-11)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dagger_is_rescaled_G(seed):
    rng = np.random.default_rng(seed)
    p, q = 2, 2
    x0 = rng.uniform(-1, 1, 4)
    ctx = OperatorContext(AlgebraSignature(p, q), x0)
    f = polynomial_to_jet(rational_poly(rng, 4, 3, 4), x0, 1)
    np.testing.assert_allclose(apply_G_dagger(f, ctx).value, ctx.q_norm2() * apply_G(f, ctx).value, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_euler_commutator(seed):
    # E G - G E = -G, since G lowers homogeneity by one
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-1, 1, 3)
    ctx = OperatorContext(AlgebraSignature(1, 2), x0)
    f = polynomial_to_jet(rational_poly(rng, 3, 4, 3), x0, 2)
    lhs = apply_euler(apply_G(f, ctx)).value - apply_G(apply_euler(f), ctx).value
    np.testing.assert_allclose(lhs, -apply_G(f, ctx).value, atol=1e-10)


def test_G_annihilates_low_degree():
    rng = np.random.default_rng(1)
    x0 = np.array([0.3, 0.6, -0.9, 1.1])
    ctx = OperatorContext(AlgebraSignature(2, 2), x0)
    f = polynomial_to_jet(rational_poly(rng, 4, 2, 4), x0, 3)
    g3 = apply_G_iterated(f, 3, ctx).value
    assert np.max(np.abs(g3)) < 1e-12


def test_G_of_constant_and_linear():
    x0 = np.array([0.0, 1.0, 2.0])
    ctx = OperatorContext(AlgebraSignature(1, 2), x0)
    m = 3
    const = PolynomialFunction.from_terms([((0, 0, 0), np.eye(8)[5])], 3, m)
    assert np.all(apply_G(polynomial_to_jet(const, x0, 1), ctx).value == 0)
    # G x1 = e1 ; G x2 = x_q / |x_q|^2 * x2
    lin = PolynomialFunction.from_terms([((1, 0, 0), np.eye(8)[0])], 3, m)
    np.testing.assert_allclose(apply_G(polynomial_to_jet(lin, x0, 1), ctx).value, np.eye(8)[1])
    lin2 = PolynomialFunction.from_terms([((0, 1, 0), np.eye(8)[0])], 3, m)
    expect = np.zeros(8)
    expect[2], expect[4] = 1.0 / 5.0, 2.0 / 5.0
    np.testing.assert_allclose(apply_G(polynomial_to_jet(lin2, x0, 1), ctx).value, expect)


def test_paravector_G_kills_identity_function():
    # G(x0 + x_vec) = |x_vec|^2 + x_vec x_vec = 0 exactly
    n = 3
    m = n
    terms = [((1, 0, 0, 0), np.eye(8)[0])]
    for j in range(1, n + 1):
        a = [0] * (n + 1)
        a[j] = 1
        terms.append((tuple(a), np.eye(8)[1 << (j - 1)]))
    f = PolynomialFunction.from_terms(terms, n + 1, m)
    x0 = np.array([0.4, -1.0, 0.5, 2.0])
    assert np.all(apply_G_paravector(polynomial_to_jet(f, x0, 1)).value == 0.0)


def test_paravector_needs_matching_dimensions():
    f = polynomial_to_jet(rational_poly(np.random.default_rng(0), 3, 2, 3), np.ones(3), 1)
    with pytest.raises(JetError):
        apply_G_paravector(f)


def test_singular_base_point():
    x0 = np.array([1.0, 0.0, 0.0])
    ctx = OperatorContext(AlgebraSignature(1, 2), x0)
    f = polynomial_to_jet(rational_poly(np.random.default_rng(0), 3, 2, 3), x0, 1)
    with pytest.raises(SingularityError):
        apply_G(f, ctx)
    # the rescaled variant is regular there
    assert np.all(np.isfinite(apply_G_dagger(f, ctx).value))


def test_context_validation():
    with pytest.raises(CliffordError):
        OperatorContext(AlgebraSignature(0, 3), np.ones(3))
    with pytest.raises(ValueError):
        OperatorContext(AlgebraSignature(1, 2), np.ones(4))
    ctx = OperatorContext(AlgebraSignature(1, 2), np.ones(3))
    f = polynomial_to_jet(rational_poly(np.random.default_rng(0), 3, 2, 3), np.zeros(3) + 2, 1)
    with pytest.raises(JetError):
        apply_G(f, ctx)
    g = polynomial_to_jet(rational_poly(np.random.default_rng(0), 3, 2, 3), np.ones(3), 0)
    with pytest.raises(JetError):
        apply_G(g, ctx)


def test_multiply_by_sides():
    rng = np.random.default_rng(4)
    x0 = rng.uniform(-1, 1, 2)
    f = polynomial_to_jet(rational_poly(rng, 2, 2, 2), x0, 1)
    g = polynomial_to_jet(rational_poly(rng, 2, 2, 2), x0, 1)
    np.testing.assert_allclose(multiply_by(f, g, "left").coeffs, jet_mul(g, f).coeffs)
    np.testing.assert_allclose(multiply_by(f, g, "right").coeffs, jet_mul(f, g).coeffs)
    with pytest.raises(ValueError):
        multiply_by(f, g, "middle")


def test_batched_G_equals_pointwise():
    rng = np.random.default_rng(9)
    xs = rng.uniform(0.5, 1.5, (3, 4))
    polys = [rational_poly(rng, 4, 3, 4) for _ in range(3)]
    batch = PolynomialFunction(np.stack([p.coeffs for p in polys]), 4, 3, 4)
    out = apply_G_iterated(polynomial_to_jet(batch, xs, 2), 2, OperatorContext(AlgebraSignature(2, 2), xs)).value
    for k in range(3):
        ctx = OperatorContext(AlgebraSignature(2, 2), xs[k])
        ref = apply_G_iterated(polynomial_to_jet(polys[k], xs[k], 2), 2, ctx).value
        np.testing.assert_allclose(out[k], ref, atol=1e-13)


def test_sympy_oracle_sanity():
    # p = q = 1: E_q x2^2 = 2 x2^2 and x_q/|x_q|^2 = e2/x2, so G x2^2 = 2 x2 e2
    xs = symbols(2)
    f = [xs[1] ** 2, 0, 0, 0]
    g = sym_G(f, xs, 1, 2)
    assert sp.simplify(g[2] - 2 * xs[1]) == 0
