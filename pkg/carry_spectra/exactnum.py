"""Exact integer/rational arithmetic, combinatorial number families and polynomial algebra."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import sympy

from . import InexactDivision

logger = logging.getLogger(__name__)

Vector = tuple[Fraction, ...]


# --- Combinatorial number families ---

def binomial(n: int, k: int) -> int:
    """Binomial coefficient, 0 when k < 0 or k > n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def eulerian_row(n: int) -> tuple[int, ...]:
    """Row n of the Eulerian triangle, A(n, 0) ... A(n, n-1)."""
    if n < 1:
        raise ValueError(f"Eulerian numbers need n >= 1, got {n}")
    if n == 1:
        return (1,)
    prev = eulerian_row(n - 1)
    row = []
    for i in range(n):
        left = prev[i] if i < n - 1 else 0
        right = prev[i - 1] if i >= 1 else 0
        row.append((i + 1) * left + (n - i) * right)
    return tuple(row)


def eulerian(n: int, i: int) -> int:
    """Eulerian number A(n, i); zero outside 0 <= i < n."""
    if i < 0 or i >= n:
        return 0
    return eulerian_row(n)[i]


def eulerian_explicit(n: int, i: int) -> int:
    """A(n, i) from the alternating sum over (i + 1 - j)^n."""
    if i < 0 or i >= n:
        return 0
    return sum((-1) ** j * binomial(n + 1, j) * (i + 1 - j) ** n for j in range(i + 1))


@lru_cache(maxsize=None)
def stirling_first_row(n: int) -> tuple[int, ...]:
    """Unsigned Stirling numbers |s(n, 0)| ... |s(n, n)|."""
    if n < 0:
        raise ValueError(f"Stirling numbers need n >= 0, got {n}")
    if n == 0:
        return (1,)
    prev = stirling_first_row(n - 1)
    row = [0] * (n + 1)
    for m in range(1, n + 1):
        row[m] = prev[m - 1] + (n - 1) * (prev[m] if m < n else 0)
    return tuple(row)


def stirling_first_unsigned(n: int, m: int) -> int:
    """|s(n, m)|; zero outside 0 <= m <= n."""
    if n < 0 or m < 0 or m > n:
        return 0
    return stirling_first_row(n)[m]


def elementary_symmetric(j: int, values: Sequence[int]) -> int:
    """The j-th elementary symmetric polynomial of the values."""
    if j < 0 or j > len(values):
        raise ValueError(f"e_{j} undefined for {len(values)} values")
    # e[m] after processing a prefix of the values
    e = [1] + [0] * j
    for v in values:
        for m in range(j, 0, -1):
            e[m] += v * e[m - 1]
    return e[j]


def rising_factorial_coefficients(k: int) -> tuple[int, ...]:
    """Coefficients of x(x+1)...(x+k-1) in ascending powers of x."""
    coeffs = [1]
    for i in range(k):
        nxt = [0] * (len(coeffs) + 1)
        for m, c in enumerate(coeffs):
            nxt[m] += i * c
            nxt[m + 1] += c
        coeffs = nxt
    return tuple(coeffs)


def fibonacci(n: int) -> int:
    """F(n) with F(0) = 0, F(1) = 1."""
    if n < 0:
        raise ValueError(f"fibonacci needs n >= 0, got {n}")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def scaled_chebyshev(L: int, tau, delta) -> Fraction:
    """S_L(tau, delta) = (sqrt delta)^L U_L(tau / (2 sqrt delta)), kept rational.

    S_0 = 1, S_1 = tau, S_L = tau S_{L-1} - delta S_{L-2}.
    """
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    tau, delta = Fraction(tau), Fraction(delta)
    prev, cur = Fraction(1), tau
    if L == 0:
        return prev
    for _ in range(L - 1):
        prev, cur = cur, tau * cur - delta * prev
    return cur


def verify_worpitzky(k: int, n_max: int, weights: Sequence[int] | None = None) -> bool:
    """Check n^k = sum_c w_c binom(n + k - 1 - c, k) for 0 <= n <= n_max.

    `weights` defaults to the Eulerian row A(k, .).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    w = list(eulerian_row(k)) if weights is None else list(weights)
    for n in range(n_max + 1):
        rhs = sum(wc * binomial(n + k - 1 - c, k) for c, wc in enumerate(w))
        if rhs != n ** k:
            return False
    return True


# --- Polynomials ---

@dataclass(frozen=True)
class RatPolynomial:
    coeffs: tuple[Fraction, ...]  # ascending degree, no trailing zeros

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs) -> "RatPolynomial":
        return cls(tuple(coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RatPolynomial":
        return cls((0,) * degree + (coeff,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "RatPolynomial":
        p = cls.of(1)
        for r in roots:
            p = p * cls.of(-Fraction(r), 1)
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return self.degree <= 0

    def coefficient(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def monic(self) -> "RatPolynomial":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading)

    def scale(self, s) -> "RatPolynomial":
        s = Fraction(s)
        return RatPolynomial(tuple(c * s for c in self.coeffs))

    def reciprocal(self, degree: int | None = None) -> "RatPolynomial":
        """x^n p(1/x) with n = degree (defaults to deg p)."""
        n = self.degree if degree is None else degree
        padded = [self.coefficient(i) for i in range(n + 1)]
        return RatPolynomial(tuple(reversed(padded)))

    def __call__(self, x):
        return poly_eval(self, x)

    def __neg__(self):
        return RatPolynomial(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPolynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, RatPolynomial):
            return NotImplemented
        return poly_multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = RatPolynomial.of(1)
        for _ in range(e):
            result = result * self
        return result

    def __str__(self):
        return format_polynomial(self)


def _as_poly(value):
    if isinstance(value, RatPolynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return RatPolynomial.of(value)
    return NotImplemented


def format_polynomial(p: RatPolynomial, var: str = "x") -> str:
    """Human-readable form, highest degree first."""
    if p.is_zero():
        return "0"
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            power = var if i == 1 else f"{var}^{i}"
            body = power if mag == 1 else f"{mag}*{power}"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_eval(p: RatPolynomial, x) -> Fraction:
    """Horner evaluation at an exact point."""
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def poly_multiply(p: RatPolynomial, q: RatPolynomial) -> RatPolynomial:
    """Schoolbook product, skipping zero coefficients of p."""
    if p.is_zero() or q.is_zero():
        return RatPolynomial(())
    out = [Fraction(0)] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(q.coeffs):
            out[i + j] += a * b
    return RatPolynomial(tuple(out))


def poly_derivative(p: RatPolynomial) -> RatPolynomial:
    """Formal derivative."""
    return RatPolynomial(tuple(i * c for i, c in enumerate(p.coeffs) if i > 0))


def poly_divmod(p: RatPolynomial, q: RatPolynomial) -> tuple[RatPolynomial, RatPolynomial]:
    """Long division p = quotient * q + remainder, deg remainder < deg q."""
    if q.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p.coeffs)
    quot = [Fraction(0)] * max(len(rem) - len(q.coeffs) + 1, 0)
    lead = q.leading
    for shift in range(len(quot) - 1, -1, -1):
        factor = rem[shift + q.degree] / lead
        quot[shift] = factor
        if factor:
            for i, c in enumerate(q.coeffs):
                rem[shift + i] -= factor * c
    return RatPolynomial(tuple(quot)), RatPolynomial(tuple(rem))


def divide_exact(p: RatPolynomial, q: RatPolynomial) -> RatPolynomial:
    """Quotient p / q; raises InexactDivision when the remainder is nonzero."""
    quot, rem = poly_divmod(p, q)
    if not rem.is_zero():
        raise InexactDivision(f"({p}) is not divisible by ({q}); remainder {rem}")
    return quot


def poly_gcd(p: RatPolynomial, q: RatPolynomial) -> RatPolynomial:
    """Monic greatest common divisor (zero only when both inputs are zero)."""
    a, b = p, q
    while not b.is_zero():
        _, r = poly_divmod(a, b)
        a, b = b, r.monic()
    return a.monic()


def primitive_integer_form(p: RatPolynomial) -> list[int]:
    """Integer coefficients with content 1 and the same roots as p."""
    if p.is_zero():
        raise ValueError("zero polynomial has no primitive form")
    den = math.lcm(*(c.denominator for c in p.coeffs))
    ints = [int(c * den) for c in p.coeffs]
    content = math.gcd(*ints)
    if ints[-1] < 0:
        content = -content
    return [c // content for c in ints]


def rational_roots(p: RatPolynomial) -> list[Fraction]:
    """All rational roots with multiplicity, ascending, by the rational-root test."""
    ints = primitive_integer_form(p)
    roots: list[Fraction] = []
    zeros = 0
    while ints[zeros] == 0:
        zeros += 1
    roots.extend([Fraction(0)] * zeros)
    ints = ints[zeros:]
    if len(ints) == 1:
        return roots
    remaining = RatPolynomial(tuple(ints))
    candidates = sorted({
        sign * Fraction(num, den)
        for num in sympy.divisors(abs(ints[0]))
        for den in sympy.divisors(abs(ints[-1]))
        for sign in (1, -1)
    })
    for c in candidates:
        linear = RatPolynomial.of(-c, 1)
        while remaining.degree >= 1 and remaining(c) == 0:
            roots.append(c)
            remaining = divide_exact(remaining, linear)
    return sorted(roots)


def is_squarefree(p: RatPolynomial) -> bool:
    """gcd(p, p') is constant, i.e. p has no repeated complex root."""
    return poly_gcd(p, poly_derivative(p)).is_constant()


def eulerian_polynomial(n: int) -> RatPolynomial:
    """A_n(x) = sum_i A(n, i) x^i."""
    return RatPolynomial(tuple(eulerian_row(n)))


# --- Matrices ---

@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]  # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ValueError("every row must have the same number of entries")
        return cls(len(rows), n_cols, tuple(e for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def outer(cls, column: Sequence, row: Sequence) -> "RatMatrix":
        return cls(len(column), len(row), tuple(Fraction(a) * b for a in column for b in row))

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self.entries[i * self.cols + j]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix(len(row_idx), len(col_idx),
                         tuple(self[i, j] for i in row_idx for j in col_idx))

    def principal(self, idx: Sequence[int]) -> "RatMatrix":
        return self.submatrix(idx, idx)

    def trace(self) -> Fraction:
        return sum((self[i, i] for i in range(min(self.rows, self.cols))), Fraction(0))

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def scale(self, s) -> "RatMatrix":
        s = Fraction(s)
        return RatMatrix(self.rows, self.cols, tuple(e * s for e in self.entries))

    def apply(self, vec: Sequence) -> Vector:
        """Matrix-vector product M v."""
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.cols} columns")
        return tuple(sum((a * b for a, b in zip(self.row(i), vec)), Fraction(0))
                     for i in range(self.rows))

    def apply_left(self, vec: Sequence) -> Vector:
        """Row-vector product v^T M."""
        return self.transpose().apply(vec)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        _same_shape(self, other)
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        _same_shape(self, other)
        return RatMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"inner shapes differ: {self.cols} vs {other.rows}")
        other_cols = [other.column(j) for j in range(other.cols)]
        return RatMatrix(self.rows, other.cols, tuple(
            sum((a * b for a, b in zip(self.row(i), col)), Fraction(0))
            for i in range(self.rows) for col in other_cols))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def power(self, p: int) -> "RatMatrix":
        """M^p by repeated squaring."""
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        if p < 0:
            raise ValueError(f"negative power {p}")
        result = RatMatrix.identity(self.rows)
        base = self
        while p:
            if p & 1:
                result = result * base
            base = base * base
            p >>= 1
        return result


def _same_shape(a: RatMatrix, b: RatMatrix) -> None:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError(f"shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dot product of lengths {len(u)} and {len(v)}")
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def determinant(m: RatMatrix) -> Fraction:
    """Fraction-free Bareiss elimination."""
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return Fraction(1)
    a = m.to_rows()
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        pivot_row = next((r for r in range(k, n) if a[r][k] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def characteristic_polynomial(m: RatMatrix) -> RatPolynomial:
    """det(lambda I - M) by the Faddeev-LeVerrier recursion, exact over Q."""
    if not m.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    identity = RatMatrix.identity(n)
    aux = RatMatrix(n, n, (0,) * (n * n))
    for k in range(1, n + 1):
        aux = m * aux + identity.scale(coeffs[n - k + 1])
        coeffs[n - k] = -(m * aux).trace() / k
    return RatPolynomial(tuple(coeffs))


def nullspace(m: RatMatrix) -> list[Vector]:
    """Basis of {v : M v = 0} from the exact reduced row echelon form."""
    a = m.to_rows()
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        pivot_row = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * m.cols
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -a[row][fc]
        basis.append(tuple(v))
    return basis


def inverse(m: RatMatrix) -> RatMatrix:
    """Exact Gauss-Jordan inverse; ZeroDivisionError when singular."""
    if not m.is_square:
        raise ValueError("inverse of a non-square matrix")
    n = m.rows
    a = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m.to_rows())]
    for c in range(n):
        pivot_row = next((r for r in range(c, n) if a[r][c] != 0), None)
        if pivot_row is None:
            raise ZeroDivisionError("matrix is singular")
        a[c], a[pivot_row] = a[pivot_row], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return RatMatrix.from_rows([row[n:] for row in a])


def minors(m: RatMatrix, order: int) -> Iterable[tuple[tuple[int, ...], tuple[int, ...], Fraction]]:
    """All minors of the given order as (rows, cols, value)."""
    for rows in combinations(range(m.rows), order):
        for cols in combinations(range(m.cols), order):
            yield rows, cols, determinant(m.submatrix(rows, cols))


# --- Polynomial matrices ---

def poly_det(entries: Sequence[Sequence[RatPolynomial]]) -> RatPolynomial:
    """Determinant of a square matrix with polynomial entries.

    Cofactor expansion up to dimension 4, fraction-free Bareiss with exact
    polynomial division beyond.
    """
    n = len(entries)
    if n == 0:
        return RatPolynomial.of(1)
    if n <= 4:
        return _cofactor_det([list(r) for r in entries])
    a = [list(r) for r in entries]
    sign = 1
    prev = RatPolynomial.of(1)
    for k in range(n - 1):
        pivot_row = next((r for r in range(k, n) if not a[r][k].is_zero()), None)
        if pivot_row is None:
            return RatPolynomial(())
        if pivot_row != k:
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = divide_exact(a[k][k] * a[i][j] - a[i][k] * a[k][j], prev)
            a[i][k] = RatPolynomial(())
        prev = a[k][k]
    return a[n - 1][n - 1].scale(sign)


def _cofactor_det(a: list[list[RatPolynomial]]) -> RatPolynomial:
    n = len(a)
    if n == 1:
        return a[0][0]
    total = RatPolynomial(())
    for j in range(n):
        if a[0][j].is_zero():
            continue
        rest = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * _cofactor_det(rest)
        total = total - term if j % 2 else total + term
    return total
