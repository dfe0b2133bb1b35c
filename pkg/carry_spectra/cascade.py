"""Cascade-free enumeration through restricted transfer matrices and the Chebyshev threshold."""

import logging
from fractions import Fraction
from itertools import product
from math import comb, factorial

from . import (BudgetExceeded, BinaryChain, CascadeSpec, HolteSystem, ThresholdVerdict,
               CHEBYSHEV, GEOMETRIC, NO_CHEBYSHEV, UNDETERMINED)
from .exactnum import (RatMatrix, RatPolynomial, characteristic_polynomial, determinant,
                       divide_exact, is_squarefree, poly_det, poly_gcd, scaled_chebyshev,
                       stirling_first_unsigned)
from .holte import build_holte

logger = logging.getLogger(__name__)

DEFAULT_BRUTE_FORCE_BUDGET = 10**7

POISSON = "Poisson"
OVERDISPERSED = "overdispersed"
UNDERDISPERSED = "underdispersed"


# --- Specs ---

def restrict(sys: HolteSystem, forbidden) -> CascadeSpec:
    """Principal submatrix of T_count on the states outside `forbidden`."""
    F = frozenset(forbidden)
    if not F:
        raise ValueError("forbidden set must be nonempty")
    if any(not 0 <= c < sys.k for c in F):
        raise ValueError(f"forbidden states must lie in 0..{sys.k - 1}, got {sorted(F)}")
    kept = tuple(c for c in range(sys.k) if c not in F)
    if not kept:
        raise ValueError("forbidden set covers every state")
    if 0 not in kept:
        raise ValueError("state 0 is the start state and cannot be forbidden")
    return CascadeSpec(source=sys, forbidden=F, kept=kept,
                       restricted_count=sys.count_matrix.principal(kept))


def transfer_matrix(chain: BinaryChain) -> RatMatrix:
    """Column-oriented counting matrix [[r+t, r], [g, g]]: a PROP digit under a pending carry is a cascade."""
    return RatMatrix.from_rows([[chain.r + chain.t, chain.r], [chain.g, chain.g]])


def chain_spec(chain: BinaryChain) -> CascadeSpec:
    """A binary chain as a spec; the cascade is excluded by the transfer matrix itself."""
    return CascadeSpec(source=chain, forbidden=frozenset(), kept=(0, 1),
                       restricted_count=transfer_matrix(chain))


def _as_spec(spec: CascadeSpec | BinaryChain) -> CascadeSpec:
    return chain_spec(spec) if isinstance(spec, BinaryChain) else spec


def in_table_coverage(spec: CascadeSpec) -> bool:
    """Binary chains and Holte restrictions with F = {k-1} or {k-2, k-1}."""
    if isinstance(spec.source, BinaryChain):
        return True
    k = spec.source.k
    return spec.forbidden in (frozenset({k - 1}), frozenset({k - 2, k - 1}))


def doubling_chain(N: int) -> BinaryChain:
    """Base-N doubling for odd N: GEN when 2d >= N, PROP when 2d = N - 1, KILL otherwise."""
    if N < 3 or N % 2 == 0:
        raise ValueError(f"doubling chain needs an odd base >= 3, got {N}")
    half = (N - 1) // 2
    return BinaryChain(N=N, g=half, t=1, r=half)


# --- Counting ---

def avoidance_count(spec: CascadeSpec | BinaryChain, L: int) -> int:
    """a(L) = 1^T T~^L e_0 on the count matrix."""
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    spec = _as_spec(spec)
    column = spec.restricted_count.power(L).column(0)
    return int(sum(column))


def avoidance_sequence(spec: CascadeSpec | BinaryChain, L_max: int) -> list[int]:
    """a(0), ..., a(L_max) by repeated application of T~."""
    spec = _as_spec(spec)
    m = spec.restricted_count
    state = tuple(Fraction(1 if i == 0 else 0) for i in range(spec.d))
    out = []
    for _ in range(L_max + 1):
        out.append(int(sum(state)))
        state = m.apply(state)
    return out


def avoidance_brute_force(k: int, N: int, forbidden, L: int,
                          budget: int = DEFAULT_BRUTE_FORCE_BUDGET) -> int:
    """Count length-L sequences of digit k-tuples whose carry from 0 never enters `forbidden`.

    Direct simulation of C' = floor((S + c) / N) over all N^(kL) inputs.
    """
    if N ** (k * L) > budget:
        raise BudgetExceeded(f"{N}^{k * L} sequences exceed the budget {budget}")
    F = frozenset(forbidden)
    sums = [sum(digits) for digits in product(range(N), repeat=k)]
    logger.debug("brute-force avoidance k=%d N=%d F=%s L=%d", k, N, sorted(F), L)

    def walk(carry: int, remaining: int) -> int:
        if remaining == 0:
            return 1
        total = 0
        for s in sums:
            nxt = (s + carry) // N
            if nxt not in F:
                total += walk(nxt, remaining - 1)
        return total

    return walk(0, L)


def chain_brute_force(chain: BinaryChain, L: int, budget: int = DEFAULT_BRUTE_FORCE_BUDGET) -> int:
    """Count length-L digit strings with no PROP digit read while a carry is pending."""
    if chain.N ** L > budget:
        raise BudgetExceeded(f"{chain.N}^{L} strings exceed the budget {budget}")
    gen = range(chain.g)
    prop = range(chain.g, chain.g + chain.t)
    count = 0
    for word in product(range(chain.N), repeat=L):
        carry = 0
        for d in word:
            if d in prop:
                if carry:
                    break
            else:
                carry = 1 if d in gen else 0
        else:
            count += 1
    return count


# --- Recurrences ---

def recurrence_coefficients(spec: CascadeSpec | BinaryChain) -> list[Fraction]:
    """[c_1, ..., c_d] with a(L) = sum_i c_i a(L - i), read off chi by Cayley-Hamilton."""
    chi = characteristic_polynomial(_as_spec(spec).restricted_count)
    d = chi.degree
    return [-chi.coefficient(d - i) for i in range(1, d + 1)]


def recurrence_sequence(spec: CascadeSpec | BinaryChain, L_max: int) -> list[int]:
    """a(0..L_max) from the first d terms and the characteristic recurrence."""
    spec = _as_spec(spec)
    coeffs = recurrence_coefficients(spec)
    d = len(coeffs)
    seq = avoidance_sequence(spec, min(d - 1, L_max))
    while len(seq) <= L_max:
        L = len(seq)
        seq.append(int(sum(c * seq[L - i] for i, c in enumerate(coeffs, start=1))))
    return seq


def verify_recurrence(spec: CascadeSpec | BinaryChain, L_max: int) -> bool:
    """a(L) from matrix powers satisfies the characteristic recurrence for d <= L <= L_max."""
    spec = _as_spec(spec)
    coeffs = recurrence_coefficients(spec)
    d = len(coeffs)
    if L_max < d:
        raise ValueError(f"L_max must be >= d = {d}, got {L_max}")
    a = avoidance_sequence(spec, L_max)
    return all(a[L] == sum(c * a[L - i] for i, c in enumerate(coeffs, start=1))
               for L in range(d, L_max + 1))


def chebyshev_form(spec: CascadeSpec | BinaryChain, L: int) -> Fraction:
    """S_L(tau, delta) + (a(1) - tau) S_{L-1}(tau, delta) for a two-state spec.

    The shift vanishes whenever a(1) equals the trace, as for every binary chain.
    """
    spec = _as_spec(spec)
    if spec.d != 2:
        raise ValueError(f"Chebyshev form needs a 2x2 restriction, got d={spec.d}")
    m = spec.restricted_count
    tau, delta = m.trace(), determinant(m)
    shift = sum(m.column(0)) - tau
    value = scaled_chebyshev(L, tau, delta)
    if L >= 1 and shift:
        value += shift * scaled_chebyshev(L - 1, tau, delta)
    return value


def chebyshev_check(spec: CascadeSpec | BinaryChain, L_max: int) -> bool:
    """a(L) == chebyshev_form(spec, L) for every L <= L_max."""
    a = avoidance_sequence(spec, L_max)
    return all(a[L] == chebyshev_form(spec, L) for L in range(L_max + 1))


def geometric_excludes_chebyshev(tau: int) -> bool:
    """No two-state Chebyshev sequence with delta >= 1 reproduces tau^L.

    S_1 = tau' pins tau' = tau, so only delta' is searched; S_2 = tau^2 - delta' rules out every delta' >= 1.
    """
    return all(scaled_chebyshev(2, tau, delta) != tau * tau for delta in range(1, tau * tau + 1))


# --- Closed forms for the F = {k-1} restriction ---

def stirling_lagrange_charpoly(k: int, N: int, weights: list[int] | None = None) -> RatPolynomial:
    """(1/k!) sum_j |s(k, k-j)| prod_{i != j} (lambda - N^{k-i}).

    `weights` replaces the Stirling row |s(k, k-j)| when given.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    w = [stirling_first_unsigned(k, k - j) for j in range(k)] if weights is None else weights
    nodes = [N ** (k - i) for i in range(k)]
    total = RatPolynomial(())
    for j in range(k):
        total = total + RatPolynomial.from_roots(n for i, n in enumerate(nodes) if i != j).scale(w[j])
    return total.scale(Fraction(1, factorial(k)))


def det_restricted_formula(k: int, N: int) -> Fraction:
    """N^binom(k,2) / k! * prod_{i=1}^{k-1} (iN + 1)."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    prod = 1
    for i in range(1, k):
        prod *= i * N + 1
    return Fraction(N ** comb(k, 2) * prod, factorial(k))


def top_restriction(k: int, N: int) -> CascadeSpec:
    """The Holte restriction with only the top carry state k-1 forbidden."""
    return restrict(build_holte(k, N), {k - 1})


# --- Threshold ---

def avoidance_generating_function(spec: CascadeSpec | BinaryChain) -> tuple[RatPolynomial, RatPolynomial]:
    """(P, Q) with sum_L a(L) z^L = P(z) / Q(z), Q = det(I - z T~), P = 1^T adj(I - z T~) e_0."""
    spec = _as_spec(spec)
    m, d = spec.restricted_count, spec.d
    pencil = [[RatPolynomial.of(1 if i == j else 0, -m[i, j]) for j in range(d)] for i in range(d)]
    Q = poly_det(pencil)
    # adj[i][0] = (-1)^i * det(pencil without row 0 and column i)
    P = RatPolynomial(())
    for i in range(d):
        minor = [row[:i] + row[i + 1:] for row in pencil[1:]]
        cofactor = poly_det(minor)
        P = P - cofactor if i % 2 else P + cofactor
    return P, Q


def _truncated(p: RatPolynomial, n: int) -> RatPolynomial:
    return RatPolynomial(p.coeffs[:n])


def verify_generating_function(spec: CascadeSpec | BinaryChain) -> bool:
    """P == Q * sum_{L<d} a(L) z^L truncated below z^d."""
    spec = _as_spec(spec)
    P, Q = avoidance_generating_function(spec)
    head = RatPolynomial(tuple(avoidance_sequence(spec, spec.d - 1)))
    return P == _truncated(Q * head, spec.d)


def threshold_classify(spec: CascadeSpec | BinaryChain) -> ThresholdVerdict:
    """Geometric for d = 1, Chebyshev for d = 2, NoChebyshev for d >= 3 when H1 and H2 hold."""
    spec = _as_spec(spec)
    m, d = spec.restricted_count, spec.d
    chi = characteristic_polynomial(m)
    covered = in_table_coverage(spec)
    verdict = ThresholdVerdict(kind=UNDETERMINED, d=d, charpoly=chi, in_table_coverage=covered)
    if not covered:
        logger.warning("forbidden set %s is outside the tabulated coverage", sorted(spec.forbidden))
        verdict.notes.append("forbidden set outside the F = {k-1} and F = {k-2, k-1} families")

    if d == 1:
        tau = m[0, 0]
        verdict.kind = GEOMETRIC
        verdict.parameters = {"tau": tau}
        if isinstance(spec.source, HolteSystem) and spec.source.k == 2:
            N = spec.source.N
            logger.warning("k=2 count restriction gives tau=%s, not N=%d", tau, N)
            verdict.notes.append(
                f"tau = N(N+1)/2 = {tau} from the count matrix; the stated a(L) = N^L uses base {N}")
        return verdict

    if d == 2:
        verdict.kind = CHEBYSHEV
        verdict.parameters = {"trace": m.trace(), "det": determinant(m),
                              "shift": sum(m.column(0)) - m.trace()}
        return verdict

    P, Q = avoidance_generating_function(spec)
    common = poly_gcd(P, Q)
    reduced = divide_exact(Q, common)
    verdict.h1 = is_squarefree(chi)
    verdict.h2 = common.is_constant()
    verdict.reduced_degree = reduced.degree
    verdict.parameters = {"P": P, "Q": Q, "gcd": common}
    if verdict.h1 and verdict.h2 and reduced.degree >= 3:
        verdict.kind = NO_CHEBYSHEV
    else:
        failing = [name for name, ok in (("H1", verdict.h1), ("H2", verdict.h2)) if not ok]
        verdict.notes.append("undetermined: " + (", ".join(failing) + " failed" if failing
                                                 else f"reduced degree {reduced.degree} < 3"))
    return verdict


# --- Dispersion ---

def dispersion_index(chain: BinaryChain) -> Fraction:
    """D_inf = pi_0 (1 + mu) / (1 - mu) with pi_0 = r / (g + r), mu = t / N."""
    if chain.g + chain.r == 0 or chain.t == chain.N:
        raise ValueError("chain with g + r = 0 is absorbing; no dispersion index")
    pi0 = Fraction(chain.r, chain.g + chain.r)
    mu = Fraction(chain.t, chain.N)
    return pi0 * (1 + mu) / (1 - mu)


def dispersion_regime(chain: BinaryChain) -> tuple[str, Fraction]:
    """(label, D_inf); Poisson exactly when 2rt == g(g + r)."""
    index = dispersion_index(chain)
    if index == 1:
        return POISSON, index
    return (OVERDISPERSED if index > 1 else UNDERDISPERSED), index


def is_poisson(chain: BinaryChain) -> bool:
    return 2 * chain.r * chain.t == chain.g * (chain.g + chain.r)
