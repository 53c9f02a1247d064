import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicegrav.clifford import (
    AlgebraSignature,
    CliffordError,
    DomainError,
    Multivector,
    SingularityError,
    algebra,
    conjugate,
    conjugate_inverse,
    geometric_product,
    grade_project,
    is_vector,
    reverse,
    vector_inverse,
    vector_norm_squared,
    versor_inverse,
    versor_norm,
)
from oracles import naive_conjugate, naive_product, naive_reverse


def rand_mv(rng, m):
    return Multivector(m, rng.uniform(-1, 1, 1 << m))


@pytest.mark.parametrize("m", range(1, 6))
def test_product_matches_word_sorting_oracle(m):
    rng = np.random.default_rng(m)
    for _ in range(5):
        a, b = rng.uniform(-1, 1, (2, 1 << m))
        ref = naive_product(list(a), list(b), m)
        np.testing.assert_allclose(algebra(m).product(a, b), ref, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("m", range(1, 6))
def test_involutions_match_oracle(m):
    a = np.random.default_rng(7).uniform(-1, 1, 1 << m)
    np.testing.assert_array_equal(algebra(m).reverse(a), naive_reverse(list(a), m))
    np.testing.assert_array_equal(algebra(m).conjugate(a), naive_conjugate(list(a), m))


def test_generator_relations():
    m = 4
    one = Multivector.scalar(m, 1.0)
    for i in range(1, m + 1):
        ei = Multivector.blade(m, i)
        assert (ei * ei).allclose(-one)
        for j in range(i + 1, m + 1):
            ej = Multivector.blade(m, j)
            assert (ei * ej + ej * ei).allclose(Multivector(m))


def test_blade_constructor_orders_generators():
    m = 3
    e1, e2 = Multivector.blade(m, 1), Multivector.blade(m, 2)
    assert Multivector.blade(m, 2, 1).allclose(e2 * e1)
    assert Multivector.blade(m, 2, 1).allclose(-Multivector.blade(m, 1, 2))
    assert (e1 * e2).allclose(Multivector.blade(m, 1, 2))
    with pytest.raises(CliffordError):
        Multivector.blade(m, 1, 1)
    with pytest.raises(CliffordError):
        Multivector.blade(m, 4)


def test_known_products():
    m = 3
    e12 = Multivector.blade(m, 1, 2)
    assert (e12 * e12).allclose(Multivector.scalar(m, -1.0))
    e123 = Multivector.blade(m, 1, 2, 3)
    assert (e123 * e123).allclose(Multivector.scalar(m, 1.0))
    assert reverse(e12).allclose(-e12)
    assert conjugate(Multivector.blade(m, 1)).allclose(-Multivector.blade(m, 1))
    assert conjugate(e123).allclose(e123)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_associativity_and_involution_laws(m, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rand_mv(rng, m) for _ in range(3))
    assert ((a * b) * c).allclose(a * (b * c), rtol=1e-12, atol=1e-12)
    assert reverse(a * b).allclose(reverse(b) * reverse(a), atol=1e-12)
    assert conjugate(a * b).allclose(conjugate(b) * conjugate(a), atol=1e-12)
    assert reverse(reverse(a)) == a
    assert conjugate(conjugate(a)) == a


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_vector_square_is_minus_norm(m, seed):
    v = np.random.default_rng(seed).normal(size=m)
    x = Multivector.vector(m, v)
    assert (x * x).allclose(Multivector.scalar(m, -float(v @ v)), atol=1e-12)
    assert is_vector(x)
    assert vector_norm_squared(x) == pytest.approx(float(v @ v))
    assert (x * vector_inverse(x)).allclose(Multivector.scalar(m, 1.0), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_versor_inverse_and_norm(m, k, seed):
    rng = np.random.default_rng(seed)
    vs = [rng.normal(size=m) for _ in range(k)]
    w = Multivector.scalar(m, 1.0)
    for v in vs:
        w = w * Multivector.vector(m, v)
    one = Multivector.scalar(m, 1.0)
    assert (w * versor_inverse(w)).allclose(one, atol=1e-10)
    assert (versor_inverse(w) * w).allclose(one, atol=1e-10)
    assert (w * conjugate_inverse(w)).allclose(one, atol=1e-10)
    assert versor_norm(w) == pytest.approx(np.prod([np.linalg.norm(v) for v in vs]), rel=1e-12)


def test_versor_norm_is_positive_for_odd_versors():
    # w w~ = -|w|^2 for a single vector, so the norm must use conjugation
    m = 3
    x = Multivector.vector(m, [3.0, 0.0, 4.0])
    assert (x * reverse(x)).scalar_part() == pytest.approx(-25.0)
    assert versor_norm(x) == pytest.approx(5.0)


def test_non_versor_is_rejected():
    m = 2
    # (2 + e1)(2 + e1)~ = 3 + 4 e1 is not a scalar
    bad = Multivector.scalar(m, 2.0) + Multivector.blade(m, 1)
    with pytest.raises(DomainError):
        versor_inverse(bad)
    with pytest.raises(SingularityError):
        vector_inverse(Multivector(m))


def test_grade_projection():
    rng = np.random.default_rng(3)
    a = rand_mv(rng, 4)
    total = sum((grade_project(a, k) for k in range(5)), Multivector(4))
    assert total == a
    with pytest.raises(CliffordError):
        grade_project(a, 5)


def test_signature_validation():
    assert AlgebraSignature(2, 3).m == 5
    with pytest.raises(CliffordError):
        AlgebraSignature(5, 4)
    with pytest.raises(CliffordError):
        AlgebraSignature(0, 2).require_split()


def test_multivector_is_immutable():
    a = Multivector.scalar(2, 1.0)
    with pytest.raises(AttributeError):
        a.coeffs = None
    with pytest.raises(ValueError):
        a.coeffs[0] = 3.0


def test_batched_product_broadcasts():
    m = 3
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 1, 8))
    b = rng.normal(size=(5, 8))
    out = algebra(m).product(a, b)
    assert out.shape == (4, 5, 8)
    np.testing.assert_allclose(out[2, 3], geometric_product(Multivector(m, a[2, 0]), Multivector(m, b[3])).coeffs)
