from fractions import Fraction

import pytest
import sympy

from carry_spectra.exactnum import RatMatrix, RatPolynomial
from carry_spectra.holte import build_holte


def sympy_charpoly(m: RatMatrix) -> RatPolynomial:
    """Independent characteristic polynomial, ascending coefficients."""
    lam = sympy.Symbol("lam")
    rows = [[sympy.Rational(str(e)) for e in row] for row in m.to_rows()]
    coeffs = sympy.Matrix(rows).charpoly(lam).all_coeffs()
    return RatPolynomial(tuple(Fraction(str(c)) for c in reversed(coeffs)))


def sympy_det(m: RatMatrix) -> Fraction:
    rows = [[sympy.Rational(str(e)) for e in row] for row in m.to_rows()]
    return Fraction(str(sympy.Matrix(rows).det()))


@pytest.fixture
def holte_4_2():
    return build_holte(4, 2)


@pytest.fixture
def holte_2_2():
    return build_holte(2, 2)


@pytest.fixture
def k4_cubic():
    """lambda^3 - 25 lambda^2 + 165 lambda - 280."""
    return RatPolynomial.of(-280, 165, -25, 1)
