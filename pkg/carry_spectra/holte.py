"""Holte count/probability matrices of k-summand base-N addition and their structural checks."""

import logging
from fractions import Fraction
from itertools import product
from math import factorial

from . import BudgetExceeded, DigitSumProfile, HolteSystem
from .exactnum import (RatMatrix, RatPolynomial, binomial, characteristic_polynomial,
                       determinant, eulerian_row, minors, poly_eval)

logger = logging.getLogger(__name__)

# Exhaustive-check caps
MAX_MINOR_DIM = 8
MAX_RESIDUE_TUPLES = 10**6
MAX_BRUTE_TUPLES = 10**5


def _require(k: int, N: int, k_min: int = 2) -> None:
    if k < k_min:
        raise ValueError(f"k must be >= {k_min}, got {k}")
    if N < 2:
        raise ValueError(f"base N must be >= 2, got {N}")


def digit_sum_counts(k: int, N: int) -> DigitSumProfile:
    """B_k(s) by iterated convolution of the all-ones window of length N."""
    _require(k, N, k_min=1)
    counts = [1] * N
    for _ in range(k - 1):
        nxt = [0] * (len(counts) + N - 1)
        for s, c in enumerate(counts):
            for d in range(N):
                nxt[s + d] += c
        counts = nxt
    return DigitSumProfile(k=k, N=N, counts=tuple(counts))


def profile_is_symmetric(profile: DigitSumProfile) -> bool:
    return profile.counts == tuple(reversed(profile.counts))


def is_log_concave(profile: DigitSumProfile) -> bool:
    b = profile.counts
    return all(b[s] * b[s] >= b[s - 1] * b[s + 1] for s in range(1, len(b) - 1))


def _window_sum(b: tuple[int, ...], lo: int, hi: int) -> int:
    """Sum of b[lo..hi] with indices outside the support contributing zero."""
    lo, hi = max(lo, 0), min(hi, len(b) - 1)
    return sum(b[lo:hi + 1]) if lo <= hi else 0


def build_holte(k: int, N: int) -> HolteSystem:
    """Count matrix T_count[c', c] = sum of B_k over s in [c'N - c, (c'+1)N - c - 1]."""
    _require(k, N)
    b = digit_sum_counts(k, N).counts
    rows = [[_window_sum(b, cp * N - c, (cp + 1) * N - c - 1) for c in range(k)]
            for cp in range(k)]
    count = RatMatrix.from_rows(rows)
    logger.debug("built Holte count matrix k=%d N=%d", k, N)
    return HolteSystem(k=k, N=N, count_matrix=count, prob_matrix=count.scale(Fraction(1, N ** k)))


def brute_force_count_matrix(k: int, N: int, limit: int = MAX_BRUTE_TUPLES) -> RatMatrix:
    """Transition counts by simulating C' = floor((S + c) / N) over every digit tuple."""
    _require(k, N)
    if N ** k > limit:
        raise BudgetExceeded(f"{N}^{k} digit tuples exceed the limit {limit}")
    rows = [[0] * k for _ in range(k)]
    for digits in product(range(N), repeat=k):
        s = sum(digits)
        for c in range(k):
            rows[(s + c) // N][c] += 1
    return RatMatrix.from_rows(rows)


def stationary_distribution(k: int) -> tuple[Fraction, ...]:
    """pi_i = A(k, i) / k!."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    kf = factorial(k)
    return tuple(Fraction(a, kf) for a in eulerian_row(k))


def verify_stationarity(sys: HolteSystem) -> bool:
    pi = stationary_distribution(sys.k)
    return sys.prob_matrix.apply(pi) == pi


def verify_stationarity_identity(k: int, N: int) -> bool:
    """sum_c A(k,c) T_count[c',c] = N^k A(k,c') for every c'."""
    t = build_holte(k, N).count_matrix
    a = eulerian_row(k)
    return all(sum(a[c] * t[cp, c] for c in range(k)) == N ** k * a[cp] for cp in range(k))


def check_centrosymmetry(m: HolteSystem | RatMatrix) -> bool:
    """T[c', c] == T[k-1-c', k-1-c] for all c, c'."""
    t = m.count_matrix if isinstance(m, HolteSystem) else m
    n = t.rows
    return all(t[i, j] == t[n - 1 - i, n - 1 - j] for i in range(n) for j in range(n))


def verify_return_count(sys: HolteSystem, n_max: int) -> bool:
    """(T_count^n)[0,0] == binom(N^n + k - 1, k) for 1 <= n <= n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    power = sys.count_matrix
    for n in range(1, n_max + 1):
        if power[0, 0] != binomial(sys.N ** n + sys.k - 1, sys.k):
            return False
        power = power * sys.count_matrix
    return True


def first_moment_identity(sys: HolteSystem) -> bool:
    """E[C' | C = c] == c/N + (k-1)(N-1)/(2N) for every incoming carry."""
    k, N, t = sys.k, sys.N, sys.prob_matrix
    offset = Fraction((k - 1) * (N - 1), 2 * N)
    return all(sum(cp * t[cp, c] for cp in range(k)) == Fraction(c, N) + offset
               for c in range(k))


def expected_charpoly(k: int, N: int) -> RatPolynomial:
    """prod_j (lambda - N^{k-j}), the characteristic polynomial of T_count."""
    return RatPolynomial.from_roots(N ** (k - j) for j in range(k))


def verify_eigenvalues(sys: HolteSystem) -> bool:
    return characteristic_polynomial(sys.count_matrix) == expected_charpoly(sys.k, sys.N)


def _check_minor_dim(m: RatMatrix) -> None:
    if not m.is_square:
        raise ValueError("total nonnegativity is checked on square matrices")
    if m.rows > MAX_MINOR_DIM:
        raise BudgetExceeded(f"dimension {m.rows} exceeds {MAX_MINOR_DIM} for an all-minors check")


def is_totally_nonnegative(m: RatMatrix) -> bool:
    """Every minor of every order is >= 0."""
    _check_minor_dim(m)
    logger.debug("enumerating minors of a %dx%d matrix", m.rows, m.rows)
    for order in range(1, m.rows + 1):
        for rows, cols, value in minors(m, order):
            if value < 0:
                logger.debug("negative minor rows=%s cols=%s value=%s", rows, cols, value)
                return False
    return True


def is_oscillatory(m: RatMatrix) -> bool:
    """Totally nonnegative, nonsingular, and some power m^p (p <= dim^2) entrywise positive."""
    _check_minor_dim(m)
    if not is_totally_nonnegative(m) or determinant(m) == 0:
        return False
    power = m
    for _ in range(m.rows * m.rows):
        if all(e > 0 for e in power.entries):
            return True
        power = power * m
    return False


def reversibility_defect(sys: HolteSystem) -> list[tuple[int, int, tuple[Fraction, Fraction]]]:
    """Pairs c < c' where pi_c T[c',c] != pi_{c'} T[c,c'], with both flows."""
    pi = stationary_distribution(sys.k)
    t = sys.prob_matrix
    defects = []
    for c in range(sys.k):
        for cp in range(c + 1, sys.k):
            forward, backward = pi[c] * t[cp, c], pi[cp] * t[c, cp]
            if forward != backward:
                defects.append((c, cp, (forward, backward)))
    return defects


def verify_uniform_residue(k: int, N: int, c: int) -> bool:
    """Every residue of (S + c) mod N is hit exactly N^{k-1} times over all digit tuples."""
    if k < 1 or N < 2:
        raise ValueError(f"need k >= 1 and N >= 2, got k={k}, N={N}")
    if N ** k > MAX_RESIDUE_TUPLES:
        raise BudgetExceeded(f"{N}^{k} digit tuples exceed {MAX_RESIDUE_TUPLES}")
    hits = [0] * N
    for digits in product(range(N), repeat=k):
        hits[(sum(digits) + c) % N] += 1
    return all(h == N ** (k - 1) for h in hits)


def restricted_charpoly(sys: HolteSystem) -> RatPolynomial:
    """Characteristic polynomial of the leading (k-1)x(k-1) block of T_count."""
    return characteristic_polynomial(sys.count_matrix.principal(range(sys.k - 1)))


def interlacing_certificate(sys: HolteSystem) -> list[Fraction]:
    """chi of the restricted count matrix at the nodes N^k, N^{k-1}, ..., N."""
    chi = restricted_charpoly(sys)
    return [poly_eval(chi, sys.N ** (sys.k - j)) for j in range(sys.k)]


def interlacing_holds(sys: HolteSystem) -> bool:
    """Nonzero values with strictly alternating sign: one root per gap between nodes."""
    values = interlacing_certificate(sys)
    if any(v == 0 for v in values):
        return False
    return all((a > 0) != (b > 0) for a, b in zip(values, values[1:]))
