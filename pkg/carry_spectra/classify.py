"""Shadow-equivalence classification of carry chains by spectral invariants."""

import logging
from itertools import permutations, product
from math import factorial, isqrt

import sympy

from . import (ACHIEVABLE, AMGM_ONLY_EXCLUDED, BELOW_AMGM, BinaryChain, BudgetExceeded,
               IdentityViolation, MarkovCarrySystem, ModuliPoint)
from .cascade import transfer_matrix
from .exactnum import (RatMatrix, RatPolynomial, characteristic_polynomial, determinant,
                       inverse, is_squarefree, nullspace, rational_roots)

logger = logging.getLogger(__name__)

MAX_MULT_RESIDUES = 8


def _matrix(system: MarkovCarrySystem | RatMatrix) -> RatMatrix:
    return system.matrix if isinstance(system, MarkovCarrySystem) else system


def chain_charpoly(chain: BinaryChain) -> RatPolynomial:
    """lambda^2 - N lambda + tg of the counting transfer matrix."""
    return characteristic_polynomial(transfer_matrix(chain))


def shadow_equivalent_binary(c1: BinaryChain | MarkovCarrySystem,
                             c2: BinaryChain | MarkovCarrySystem) -> bool:
    """Equal (N, d) for binary chains, equal (trace, det) for two-state probability chains."""
    if isinstance(c1, BinaryChain) and isinstance(c2, BinaryChain):
        return (c1.N, c1.det) == (c2.N, c2.det)
    if isinstance(c1, MarkovCarrySystem) and isinstance(c2, MarkovCarrySystem):
        if c1.k != 2 or c2.k != 2:
            raise ValueError("binary shadow equivalence compares two-state systems")
        a, b = c1.matrix, c2.matrix
        return (a.trace(), determinant(a)) == (b.trace(), determinant(b))
    raise ValueError("compare two BinaryChains or two MarkovCarrySystems")


def sigma(d: int) -> int:
    """Smallest alphabet realizing determinant d: min q + d/q over divisors q <= sqrt(d)."""
    if d < 1:
        raise ValueError(f"sigma is defined for d >= 1, got {d}")
    return min(q + d // q for q in sympy.divisors(d) if q * q <= d)


def achievable_witness(N: int, d: int) -> tuple[int, int] | None:
    """Some (g, t) with g*t == d and g + t <= N, or None."""
    if d == 0:
        return (0, 0)
    for q in sympy.divisors(d):
        if q * q > d:
            break
        if q + d // q <= N:
            return (q, d // q)
    return None


def moduli_point(N: int, d: int) -> ModuliPoint:
    """Achievable when some g*t = d fits g + t <= N; otherwise split by the AM-GM bound N^2 >= 4d."""
    witness = achievable_witness(N, d)
    if witness is not None:
        return ModuliPoint(N=N, d=d, status=ACHIEVABLE, witness=witness)
    if N * N >= 4 * d:
        return ModuliPoint(N=N, d=d, status=AMGM_ONLY_EXCLUDED)
    return ModuliPoint(N=N, d=d, status=BELOW_AMGM)


def moduli_space(N_max: int, d_max: int) -> list[ModuliPoint]:
    """Every (N, d) with 1 <= N <= N_max and 0 <= d <= d_max, ordered by N then d."""
    if N_max < 1 or d_max < 0:
        raise ValueError(f"bounds must be N_max >= 1 and d_max >= 0, got {N_max}, {d_max}")
    return [moduli_point(N, d) for N in range(1, N_max + 1) for d in range(d_max + 1)]


def stochasticity_check(system: MarkovCarrySystem | RatMatrix) -> bool:
    """chi(1) == 0."""
    return characteristic_polynomial(_matrix(system))(1) == 0


def classify_general(s1: MarkovCarrySystem | RatMatrix, s2: MarkovCarrySystem | RatMatrix) -> bool:
    """Shadow-equivalent iff the characteristic polynomials agree; both spectra must be simple."""
    chis = []
    for s in (s1, s2):
        chi = characteristic_polynomial(_matrix(s))
        if not is_squarefree(chi):
            raise ValueError(f"characteristic polynomial {chi} has a repeated root")
        chis.append(chi)
    return chis[0] == chis[1]


def _eigenbasis(m: RatMatrix, roots) -> RatMatrix | None:
    columns = []
    for lam in roots:
        basis = nullspace(m - RatMatrix.identity(m.rows).scale(lam))
        if len(basis) != 1:
            return None
        columns.append(basis[0])
    return RatMatrix.from_rows([[col[i] for col in columns] for i in range(m.rows)])


def similarity_witness(a: MarkovCarrySystem | RatMatrix,
                       b: MarkovCarrySystem | RatMatrix) -> RatMatrix | None:
    """M with M A M^-1 == B when both spectra are simple and rational, else None."""
    ma, mb = _matrix(a), _matrix(b)
    if not classify_general(ma, mb):
        return None
    roots = rational_roots(characteristic_polynomial(ma))
    if len(roots) != ma.rows:
        logger.debug("irrational spectrum; the shared characteristic polynomial is the certificate")
        return None
    pa, pb = _eigenbasis(ma, roots), _eigenbasis(mb, roots)
    if pa is None or pb is None:
        return None
    witness = pb * inverse(pa)
    if witness * ma * inverse(witness) != mb:
        raise IdentityViolation("similarity witness does not conjugate A onto B")
    return witness


def mult_shadow_search(N: int, L: int) -> list[tuple[tuple[tuple[int, ...], ...], dict]]:
    """Every bijection h: Z/N^L -> digit vectors with h(ab)_i = g(h(a)_i, h(b)_i) for one table g.

    Each witness is (h as a tuple indexed by residue, g as a dict on digit pairs).
    """
    M = N ** L
    if M > MAX_MULT_RESIDUES:
        raise BudgetExceeded(f"{N}^{L} = {M} residues exceed {MAX_MULT_RESIDUES}")
    vectors = list(product(range(N), repeat=L))
    products = [(a, b, a * b % M) for a in range(M) for b in range(M)]
    witnesses = []
    for h in permutations(vectors):
        g = _derive_table(h, products, L)
        if g is not None:
            witnesses.append((h, g))
    logger.debug("N=%d L=%d: %d of %d bijections consistent", N, L, len(witnesses), factorial(M))
    return witnesses


def _derive_table(h, products, L: int) -> dict | None:
    """Fill g cell by cell; None at the first contradiction."""
    g: dict[tuple[int, int], int] = {}
    for a, b, ab in products:
        for i in range(L):
            key = (h[a][i], h[b][i])
            want = h[ab][i]
            have = g.setdefault(key, want)
            if have != want:
                return None
    return g


def discriminant_is_square(system: MarkovCarrySystem | RatMatrix) -> bool:
    """trace^2 - 4 det is a rational square for a 2x2 system."""
    m = _matrix(system)
    disc = m.trace() ** 2 - 4 * determinant(m)
    if disc < 0:
        return False
    num, den = disc.numerator, disc.denominator
    return isqrt(num) ** 2 == num and isqrt(den) ** 2 == den
