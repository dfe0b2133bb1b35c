"""Closed-form biorthogonal eigenvector system of the Holte matrix.

With T[c', c] column-stochastic, the stationary-side family u_j satisfies
T u_j = N^-j u_j (u_0 = pi) and the observable-side family v_j satisfies
v_j^T T = N^-j v_j^T (v_0 = all-ones). Both are independent of N.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import factorial

from . import EigenSystem, IdentityViolation, InexactDivision
from .exactnum import (RatMatrix, RatPolynomial, binomial, divide_exact, dot,
                       elementary_symmetric, eulerian, eulerian_polynomial,
                       nullspace, stirling_first_unsigned, Vector)
from .holte import build_holte

logger = logging.getLogger(__name__)

DEFAULT_WITNESS_BASE = 2
DEFAULT_CHECK_BASE = 3


def _check_index(k: int, j: int) -> None:
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not 0 <= j <= k - 1:
        raise ValueError(f"j must lie in 0..{k - 1}, got {j}")


def stirling_constant(k: int, j: int) -> Fraction:
    """c_{k,j} = |s(k, k-j)| / k!."""
    return Fraction(stirling_first_unsigned(k, k - j), factorial(k))


def _left_shape(k: int, j: int) -> RatPolynomial:
    """(1 - x)^j A_{k-j}(x), the unnormalized generating function of u_j."""
    return RatPolynomial.of(1, -1) ** j * eulerian_polynomial(k - j)


def _pad(p: RatPolynomial, length: int) -> Vector:
    return tuple(p.coefficient(i) for i in range(length))


def left_eigenvector(k: int, j: int) -> Vector:
    """Coefficients of c_{k,j} (1 - x)^j A_{k-j}(x), padded to length k."""
    _check_index(k, j)
    return _pad(_left_shape(k, j).scale(stirling_constant(k, j)), k)


def left_eigenvector_entrywise(k: int, j: int) -> Vector:
    """u_j[i] = c_{k,j} sum_m binom(j, m) (-1)^m A(k-j, i-m)."""
    _check_index(k, j)
    c = stirling_constant(k, j)
    return tuple(c * sum((-1) ** m * binomial(j, m) * eulerian(k - j, i - m) for m in range(j + 1))
                 for i in range(k))


def _observable_vector(k: int, j: int, N: int) -> Vector:
    count = build_holte(k, N).count_matrix
    shifted = count.transpose() - RatMatrix.identity(k).scale(N ** (k - j))
    basis = nullspace(shifted)
    if len(basis) != 1:
        raise IdentityViolation(
            f"eigenspace of N^{k - j} has dimension {len(basis)} for k={k}, N={N}; expected 1")
    v = basis[0]
    if v[0] == 0:
        raise IdentityViolation(f"v_{j} has a zero leading entry for k={k}, N={N}")
    return tuple(x / v[0] for x in v)


@lru_cache(maxsize=None)
def right_eigenvector(k: int, j: int, N_witness: int = DEFAULT_WITNESS_BASE,
                      check_base: int | None = DEFAULT_CHECK_BASE) -> Vector:
    """Nullspace vector of (T_count^T - N^{k-j} I) at the witness base, scaled so v_j[0] = 1.

    When `check_base` is given the same vector must come out at that base too.
    """
    _check_index(k, j)
    if N_witness < 2:
        raise ValueError(f"witness base must be >= 2, got {N_witness}")
    logger.debug("extracting v_%d for k=%d at N=%d", j, k, N_witness)
    v = _observable_vector(k, j, N_witness)
    if check_base is not None and check_base != N_witness:
        other = _observable_vector(k, j, check_base)
        if other != v:
            raise IdentityViolation(
                f"v_{j} for k={k} differs between bases {N_witness} and {check_base}")
    return v


def quotient_polynomial(k: int, j: int) -> RatPolynomial:
    """Q_j = (sum_i binom(k-1, i) v_j[i] x^i) / (1 + x)^{k-1-j}, by exact division."""
    _check_index(k, j)
    v = right_eigenvector(k, j)
    weighted = RatPolynomial(tuple(binomial(k - 1, i) * v[i] for i in range(k)))
    try:
        return divide_exact(weighted, RatPolynomial.of(1, 1) ** (k - 1 - j))
    except InexactDivision as e:
        raise IdentityViolation(f"Q_{j} extraction failed for k={k}: {e}") from e


def q2_closed_form(k: int) -> RatPolynomial:
    """((3k-1)(1 + x^2) - 2(3k-5)x) / (3k-1), valid for k >= 4."""
    if k < 4:
        raise ValueError(f"the Q_2 closed form needs k >= 4, got {k}")
    return RatPolynomial.of(3 * k - 1, -2 * (3 * k - 5), 3 * k - 1).scale(Fraction(1, 3 * k - 1))


def q3_closed_form(k: int) -> RatPolynomial:
    """-(x - 1)(k x^2 - 2(k-4)x + k) / k, valid for k >= 5."""
    if k < 5:
        raise ValueError(f"the Q_3 closed form needs k >= 5, got {k}")
    return (-RatPolynomial.of(-1, 1) * RatPolynomial.of(k, -2 * (k - 4), k)).scale(Fraction(1, k))


def quotient_deviation(k: int, j: int) -> RatPolynomial:
    """Q_j - (1 - x)^j."""
    return quotient_polynomial(k, j) - RatPolynomial.of(1, -1) ** j


def is_palindromic(q: RatPolynomial, j: int) -> bool:
    """x^j Q(1/x) == (-1)^j Q(x)."""
    return q.reciprocal(j) == q.scale((-1) ** j)


def spectral_projector(k: int, j: int, N: int | None = None) -> RatMatrix:
    """E_j = u_j v_j^T; rank one, and independent of N.

    With N given, E_j is also checked against the base-N matrix: T E_j == E_j T == N^-j E_j.
    """
    _check_index(k, j)
    e = RatMatrix.outer(left_eigenvector(k, j), right_eigenvector(k, j))
    if N is not None:
        t = build_holte(k, N).prob_matrix
        expected = e.scale(Fraction(1, N ** j))
        if t * e != expected or e * t != expected:
            raise IdentityViolation(f"E_{j} is not the N^-{j} projector of T for k={k}, N={N}")
    return e


def normalization_constants(k: int) -> tuple[Fraction, ...]:
    """c_{k,j} from Stirling numbers, elementary symmetric sums and the projector entry.

    The projector route normalizes the raw shape (1 - x)^j A_{k-j} against v_j,
    so it does not reuse the Stirling value.
    """
    kf = factorial(k)
    constants = []
    for j in range(k):
        by_stirling = stirling_constant(k, j)
        by_esym = Fraction(elementary_symmetric(j, range(1, k)), kf)
        shape = _pad(_left_shape(k, j), k)
        v = right_eigenvector(k, j)
        by_projector = shape[0] * v[0] / dot(shape, v)
        if not by_stirling == by_esym == by_projector:
            raise IdentityViolation(
                f"c_{{{k},{j}}} disagrees: stirling={by_stirling}, esym={by_esym}, "
                f"projector={by_projector}")
        constants.append(by_stirling)
    return tuple(constants)


def build_eigensystem(k: int, N: int | None = None) -> EigenSystem:
    """Both eigenvector families with c_{k,j} and Q_j; eigenvalues only when N is given."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    logger.debug("building eigensystem for k=%d", k)
    return EigenSystem(
        k=k,
        left=tuple(left_eigenvector(k, j) for j in range(k)),
        right=tuple(right_eigenvector(k, j) for j in range(k)),
        constants=normalization_constants(k),
        quotients=tuple(quotient_polynomial(k, j) for j in range(k)),
        N=N,
        eigenvalues=tuple(Fraction(1, N ** j) for j in range(k)) if N is not None else (),
    )


def verify_biorthogonality(k: int) -> bool:
    """u_m . v_j == delta_{mj} for all m, j."""
    left = [left_eigenvector(k, j) for j in range(k)]
    right = [right_eigenvector(k, j) for j in range(k)]
    return all(dot(left[m], right[j]) == (1 if m == j else 0) for m in range(k) for j in range(k))


def verify_ckj_sum(k: int) -> bool:
    """sum_j c_{k,j} == 1."""
    return sum(stirling_constant(k, j) for j in range(k)) == 1


def verify_spectral_return_identity(k: int, N: int, n_max: int) -> bool:
    """sum_j c_{k,j} M^-j == binom(M + k - 1, k) / M^k for M = N^n, n <= n_max."""
    constants = [stirling_constant(k, j) for j in range(k)]
    for n in range(1, n_max + 1):
        M = N ** n
        lhs = sum(c / M ** j for j, c in enumerate(constants))
        if lhs != Fraction(binomial(M + k - 1, k), M ** k):
            return False
    return True


def verify_eigen_equations(k: int, N: int) -> bool:
    """T u_j == N^-j u_j and v_j^T T == N^-j v_j^T for every j."""
    t = build_holte(k, N).prob_matrix
    for j in range(k):
        lam = Fraction(1, N ** j)
        u, v = left_eigenvector(k, j), right_eigenvector(k, j)
        if t.apply(u) != tuple(lam * x for x in u):
            return False
        if t.apply_left(v) != tuple(lam * x for x in v):
            return False
    return True


def verify_left_entrywise(k: int) -> bool:
    return all(left_eigenvector(k, j) == left_eigenvector_entrywise(k, j) for j in range(k))


def verify_projectors(k: int, N: int) -> bool:
    """E_j^2 == E_j, sum E_j == I, T == sum N^-j E_j and E_j[0,0] == c_{k,j}."""
    projectors = [spectral_projector(k, j, N) for j in range(k)]
    zero = RatMatrix(k, k, (0,) * (k * k))
    total, expansion = zero, zero
    for j, e in enumerate(projectors):
        if e * e != e or e[0, 0] != stirling_constant(k, j):
            return False
        total = total + e
        expansion = expansion + e.scale(Fraction(1, N ** j))
    return total == RatMatrix.identity(k) and expansion == build_holte(k, N).prob_matrix


def verify_left_moment_vanishing(k: int) -> bool:
    """sum_i u_j[i] i^m == 0 for every m < j."""
    for j in range(k):
        u = left_eigenvector(k, j)
        if any(sum(x * i ** m for i, x in enumerate(u)) != 0 for m in range(j)):
            return False
    return True


def verify_reversal_symmetry(k: int) -> bool:
    """v_j[i] == (-1)^j v_j[k-1-i], which also pins v_j[k-1] = (-1)^j."""
    for j in range(k):
        v = right_eigenvector(k, j)
        sign = (-1) ** j
        if any(v[i] != sign * v[k - 1 - i] for i in range(k)):
            return False
    return True


def verify_quotients(k: int) -> bool:
    """Every Q_j has Q_j(0) == 1, degree j and the palindrome symmetry."""
    for j in range(k):
        q = quotient_polynomial(k, j)
        if q.coefficient(0) != 1 or q.degree != j or not is_palindromic(q, j):
            return False
    return True
