import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laxkit.tensor import (LaurentMatrix, LaurentPoly, LaurentSeries, exp_series, log_series,
                           permutation_operator, tensor_product, unit_matrix)


def e(d, i, j):
    return unit_matrix(d, i, j)


def test_unit_matrix_products():
    assert np.array_equal(e(2, 1, 2) @ e(2, 2, 1), e(2, 1, 1))
    assert not np.any(e(2, 1, 2) @ e(2, 1, 2))
    assert np.array_equal(e(3, 1, 3) @ e(3, 3, 2), e(3, 1, 2))


@pytest.mark.parametrize("args", [(2, 0, 1), (2, 3, 1), (3, 1, 4), (0, 1, 1)])
def test_unit_matrix_range(args):
    with pytest.raises((ValueError, IndexError)):
        unit_matrix(*args)


def test_unit_matrix_identity_all_indices():
    d = 3
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            for k in range(1, d + 1):
                for m in range(1, d + 1):
                    want = e(d, i, m) if j == k else np.zeros((d, d))
                    assert np.array_equal(e(d, i, j) @ e(d, k, m), want)


def test_tensor_product_examples(rng):
    assert np.array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    t = tensor_product(e(2, 1, 2), e(2, 2, 1))
    assert t[1, 2] == 1 and np.count_nonzero(t) == 1
    a, b = rng.normal(size=(2, 2, 2))
    i2 = np.eye(2)
    assert np.allclose(tensor_product(a, i2) @ tensor_product(i2, b), tensor_product(a, b), atol=1e-14)


def test_tensor_product_blocks(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(2, 2))
    t = tensor_product(a, b)
    assert t.shape == (6, 6)
    for i in range(3):
        for j in range(3):
            assert np.allclose(t[2 * i:2 * i + 2, 2 * j:2 * j + 2], a[i, j] * b)


def test_mixed_product(rng):
    a, b, c, d = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(4))
    lhs = tensor_product(a, b) @ tensor_product(c, d)
    scale = max(1.0, np.max(np.abs(lhs)))
    assert np.max(np.abs(lhs - tensor_product(a @ c, b @ d))) <= 1e-13 * scale


def test_permutation_operator(rng):
    p = permutation_operator(2)
    e1, e2 = np.eye(2)
    assert np.array_equal(p @ np.kron(e1, e2), np.kron(e2, e1))
    assert np.array_equal(p @ p, np.eye(4))
    assert np.trace(permutation_operator(3)) == 3
    a, b = rng.normal(size=(2, 4))
    assert np.allclose(permutation_operator(4) @ np.kron(a, b), np.kron(b, a))
    with pytest.raises(ValueError):
        permutation_operator(1)


def test_laurent_poly_examples():
    lam = LaurentPoly.monomial(1)
    assert ((lam + 1) * (lam - 1)).allclose(LaurentPoly(0, [-1, 0, 1]))
    assert LaurentPoly(0, [-3, 0, 1]).eval(2) == 1
    assert LaurentPoly(0, [0, 0]).is_zero
    p = LaurentPoly(-2, [0, 1, 2, 0])
    assert p.min_power == -1 and p.max_power == 0


def test_laurent_eval_at_zero():
    with pytest.raises(ZeroDivisionError):
        LaurentPoly(-1, [1, 1]).eval(0)
    assert LaurentPoly(0, [2, 1]).eval(0) == 2


def test_laurent_matrix_square():
    m = LaurentMatrix.from_terms({1: [[1, 0], [0, 0]], 0: [[0, 1], [-1, 0]]})
    sq = m @ m
    want = LaurentMatrix.from_terms({2: [[1, 0], [0, 0]], 1: [[0, 1], [-1, 0]], 0: [[-1, 0], [0, -1]]})
    for pw in range(0, 3):
        assert np.allclose(sq.term(pw), want.term(pw))
    assert sq.trace().allclose(LaurentPoly(0, [-2, 0, 1]))


def test_laurent_matrix_eval_commutes(rng):
    terms = lambda: {k: rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for k in (-1, 0, 2)}  # noqa: E731
    a, b = LaurentMatrix.from_terms(terms()), LaurentMatrix.from_terms(terms())
    for lam in (0.3 + 0.2j, -1.7, 2.5j):
        lhs = (a @ b).eval(lam)
        scale = max(1.0, np.max(np.abs(lhs)))
        assert np.max(np.abs(lhs - a.eval(lam) @ b.eval(lam))) <= 1e-12 * scale


def test_log_series_examples():
    s = log_series(LaurentPoly(0, [-3, 0, 1]), 6)
    assert s.coeff(-1) == 0
    assert abs(s.coeff(-2) + 3) < 1e-14 and abs(s.coeff(-4) + 4.5) < 1e-14
    assert abs(s.coeff(-6 + 1)) < 1e-14
    z = log_series(LaurentPoly(1, [1]), 5)
    assert np.all(z.as_array() == 0)
    d = log_series(LaurentPoly(0, [1.5, 1.5, 1]), 4)
    assert np.allclose(d.as_array()[1:3], [1.5, 0.375], atol=1e-15)


def test_log_series_against_taylor_oracle():
    import sympy as sp
    w = sp.symbols("w")
    expr = sp.log(1 + sp.Rational(3, 2) * w + sp.Rational(3, 2) * w**2)
    ser = sp.series(expr, w, 0, 8).removeO()
    want = [complex(ser.coeff(w, k)) for k in range(8)]
    got = log_series(LaurentPoly(0, [1.5, 1.5, 1]), 8).as_array()
    assert np.allclose(got, want, atol=1e-14)


def test_log_series_errors():
    with pytest.raises(ValueError):
        log_series(LaurentPoly(0, []), 3)
    with pytest.raises(ValueError):
        log_series(LaurentPoly(0, [1, 1]), 0)
    with pytest.raises(IndexError):
        log_series(LaurentPoly(0, [1, 1]), 3).coeff(-3)
    with pytest.raises(ValueError):
        LaurentSeries(0, (0.0, 1.0), 3)


coef = st.complex_numbers(min_magnitude=0, max_magnitude=5, allow_nan=False, allow_infinity=False)
polys = st.builds(LaurentPoly, st.integers(-3, 3), st.lists(coef, min_size=1, max_size=5))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_laurent_ring_axioms(a, b, c):
    assert ((a + b) * c).allclose(a * c + b * c, atol=1e-9)
    assert (a * b).allclose(b * a, atol=1e-12)
    assert (a - a).is_zero


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.complex_numbers(min_magnitude=0.5, max_magnitude=2))
def test_laurent_eval_homomorphism(a, b, lam):
    lhs = (a * b).eval(lam)
    assert abs(lhs - a.eval(lam) * b.eval(lam)) <= 1e-10 * max(1.0, abs(lhs))


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=1, max_size=5), st.integers(2, 10))
def test_exp_log_round_trip(tail, order):
    p = LaurentPoly(0, list(reversed([1.0] + tail)))
    s = log_series(p, order)
    back = exp_series(s).as_array()
    want = np.zeros(order, dtype=complex)
    desc = np.array([1.0] + tail, dtype=complex)[:order]
    want[:desc.size] = desc
    scale = max(1.0, np.max(np.abs(want)))
    # the log coefficients grow like the largest root power; compare relative to them
    growth = max(1.0, np.max(np.abs(s.as_array())))
    assert np.max(np.abs(back - want)) <= 1e-12 * scale * growth
