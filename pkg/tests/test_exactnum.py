import random
from fractions import Fraction
from math import factorial

import pytest

from carry_spectra import InexactDivision
from carry_spectra.exactnum import (
    RatMatrix, RatPolynomial, binomial, characteristic_polynomial, determinant, divide_exact,
    elementary_symmetric, eulerian, eulerian_explicit, eulerian_polynomial, eulerian_row, fibonacci,
    format_polynomial, inverse, is_squarefree, minors, nullspace, poly_det, poly_derivative,
    poly_gcd, rational_roots, rising_factorial_coefficients, scaled_chebyshev,
    stirling_first_row, stirling_first_unsigned, verify_worpitzky,
)
from carry_spectra.holte import build_holte

from conftest import sympy_charpoly, sympy_det


@pytest.mark.parametrize("n,k,expected", [(4, 2, 6), (4, -1, 0), (3, 2, 3), (3, 4, 0)])
def test_binomial(n, k, expected):
    assert binomial(n, k) == expected


def test_eulerian_values():
    assert eulerian(4, 1) == 11
    assert eulerian(5, 2) == 66
    assert all(eulerian(n, 0) == 1 for n in range(1, 9))
    assert eulerian(4, -1) == 0 and eulerian(4, 4) == 0


@pytest.mark.parametrize("n", range(1, 11))
def test_eulerian_row_symmetry_and_sum(n):
    row = eulerian_row(n)
    assert row == tuple(reversed(row))
    assert sum(row) == factorial(n)


@pytest.mark.parametrize("n", range(1, 9))
def test_eulerian_explicit_matches_recurrence(n):
    assert [eulerian_explicit(n, i) for i in range(n)] == list(eulerian_row(n))


def test_eulerian_polynomial():
    assert eulerian_polynomial(4) == RatPolynomial.of(1, 11, 11, 1)


def test_stirling_values():
    assert stirling_first_unsigned(5, 3) == 35
    assert stirling_first_unsigned(4, 2) == 11
    assert all(stirling_first_unsigned(k, k) == 1 for k in range(10))
    assert stirling_first_unsigned(4, 5) == 0


@pytest.mark.parametrize("n", range(0, 11))
def test_stirling_row_sum(n):
    assert sum(stirling_first_row(n)) == factorial(n)


@pytest.mark.parametrize("k", range(1, 9))
def test_rising_factorial_is_stirling_row(k):
    assert rising_factorial_coefficients(k) == stirling_first_row(k)


def test_elementary_symmetric():
    assert elementary_symmetric(0, [5, 7]) == 1
    assert elementary_symmetric(2, [1, 2, 3, 4]) == 35
    with pytest.raises(ValueError):
        elementary_symmetric(3, [1, 2])


@pytest.mark.parametrize("k", range(1, 9))
def test_elementary_symmetric_is_stirling(k):
    values = list(range(1, k))
    assert all(elementary_symmetric(j, values) == stirling_first_unsigned(k, k - j) for j in range(k))


def test_scaled_chebyshev():
    assert scaled_chebyshev(0, 7, 3) == 1
    assert scaled_chebyshev(2, 3, 1) == 8
    assert scaled_chebyshev(1, 5, 6) == 5
    assert all(scaled_chebyshev(L, 2, 1) == L + 1 for L in range(20))
    assert scaled_chebyshev(2, Fraction(3, 2), Fraction(1, 2)) == Fraction(7, 4)
    with pytest.raises(ValueError):
        scaled_chebyshev(-1, 1, 1)


def test_fibonacci():
    assert fibonacci(2) == 1
    assert fibonacci(6) == 8
    assert fibonacci(10) == 55


def test_fraction_arithmetic_laws():
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (Fraction(rng.randint(-50, 50), rng.randint(1, 30)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a * b).denominator > 0


def test_polynomial_normalizes_trailing_zeros():
    p = RatPolynomial.of(1, 2, 0, 0)
    assert p.coeffs == (1, 2)
    assert p.degree == 1
    assert RatPolynomial.of(0).degree == -1


def test_format_polynomial(k4_cubic):
    assert format_polynomial(k4_cubic) == "x^3 - 25*x^2 + 165*x - 280"
    assert format_polynomial(RatPolynomial.of(Fraction(1, 2), -1)) == "-x + 1/2"


def test_no_rational_roots_of_k4_cubic(k4_cubic):
    assert rational_roots(k4_cubic) == []


def test_rational_roots_with_multiplicity():
    p = RatPolynomial.from_roots([Fraction(1, 2), -3, -3, 0])
    assert rational_roots(p) == [-3, -3, 0, Fraction(1, 2)]


def test_gcd_is_monic():
    p = RatPolynomial.of(2, 4, 6)
    assert poly_gcd(p, p) == p.monic()
    assert poly_gcd(RatPolynomial.of(-1, 1), RatPolynomial.of(1, 1)) == RatPolynomial.of(1)


def test_divide_exact():
    one_plus = RatPolynomial.of(1, 1)
    p = one_plus * one_plus * RatPolynomial.of(1, -1)
    assert divide_exact(p, one_plus * one_plus) == RatPolynomial.of(1, -1)
    with pytest.raises(InexactDivision):
        divide_exact(p, RatPolynomial.of(2, 1))


def test_squarefree(k4_cubic):
    assert is_squarefree(k4_cubic)
    assert not is_squarefree(RatPolynomial.from_roots([1, 1, 2]))
    assert poly_derivative(k4_cubic) == RatPolynomial.of(165, -50, 3)


def test_worpitzky():
    assert verify_worpitzky(1, 10)
    assert verify_worpitzky(4, 20)
    assert not verify_worpitzky(4, 5, weights=[1, 11, 12, 1])


@pytest.mark.parametrize("k,N", [(3, 2), (4, 3), (5, 2), (6, 2)])
def test_determinant_and_charpoly_match_sympy(k, N):
    m = build_holte(k, N).count_matrix
    assert determinant(m) == sympy_det(m)
    assert characteristic_polynomial(m) == sympy_charpoly(m)


def test_matrix_algebra():
    m = RatMatrix.from_rows([[2, 1], [1, 1]])
    assert m.power(3) == m * m * m
    assert m.power(0) == RatMatrix.identity(2)
    assert m * inverse(m) == RatMatrix.identity(2)
    assert m.apply((1, 0)) == (2, 1)
    assert m.transpose().apply_left((1, 0)) == m.apply((1, 0))
    with pytest.raises(ZeroDivisionError):
        inverse(RatMatrix.from_rows([[1, 2], [2, 4]]))


def test_nullspace():
    basis = nullspace(RatMatrix.from_rows([[1, 2], [2, 4]]))
    assert basis == [(-2, 1)]
    assert nullspace(RatMatrix.identity(3)) == []


def test_minor_count():
    m = build_holte(3, 2).count_matrix
    assert len(list(minors(m, 2))) == 9
    assert sorted(v for _, _, v in minors(RatMatrix.from_rows([[3, 1], [1, 3]]), 1)) == [1, 1, 3, 3]


def test_poly_det_matches_reversed_charpoly():
    # 5x5 pencil goes through fraction-free elimination
    m = build_holte(6, 2).count_matrix.principal(range(5))
    pencil = [[RatPolynomial.of(1 if i == j else 0, -m[i, j]) for j in range(5)] for i in range(5)]
    assert poly_det(pencil) == characteristic_polynomial(m).reciprocal()
