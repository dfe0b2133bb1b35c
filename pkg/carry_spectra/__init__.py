"""Exact spectral analysis of carry-propagation Markov chains."""

import math
from dataclasses import dataclass, field
from fractions import Fraction


class BudgetExceeded(ValueError):
    """An exhaustive computation refused because the instance is over its cap."""


class InexactDivision(ArithmeticError):
    """Polynomial division left a nonzero remainder."""


class IdentityViolation(RuntimeError):
    """An identity that must hold exactly did not."""


from .exactnum import RatMatrix, RatPolynomial  # noqa: E402


# Threshold verdict kinds
GEOMETRIC = "Geometric"
CHEBYSHEV = "Chebyshev"
NO_CHEBYSHEV = "NoChebyshev"
UNDETERMINED = "Undetermined"

# Moduli point statuses
ACHIEVABLE = "Achievable"
AMGM_ONLY_EXCLUDED = "AMGMOnlyExcluded"
BELOW_AMGM = "BelowAMGM"

# Check statuses
PASS = "PASS"
FAIL = "FAIL"
SKIP = "SKIP"


@dataclass(frozen=True)
class DigitSumProfile:
    k: int
    N: int
    counts: tuple[int, ...]  # B_k(s) for s = 0 .. k(N-1)


@dataclass(frozen=True)
class HolteSystem:
    k: int                   # summands, also the number of carry states
    N: int                   # base
    count_matrix: RatMatrix  # [outgoing, incoming], columns sum to N^k
    prob_matrix: RatMatrix   # count_matrix / N^k


@dataclass(frozen=True)
class EigenSystem:
    k: int
    left: tuple[tuple[Fraction, ...], ...]    # u_j
    right: tuple[tuple[Fraction, ...], ...]   # v_j, v_j[0] = 1
    constants: tuple[Fraction, ...]           # c_{k,j} = E_j[0,0]
    quotients: tuple[RatPolynomial, ...]      # Q_j
    N: int | None = None
    eigenvalues: tuple[Fraction, ...] = ()    # N^{-j}, only when N is given


@dataclass(frozen=True)
class BinaryChain:
    N: int   # alphabet size
    g: int   # GEN digits
    t: int   # PROP digits
    r: int   # KILL digits

    def __post_init__(self):
        if min(self.g, self.t, self.r) < 0:
            raise ValueError(f"g, t, r must be nonnegative, got {self.g}, {self.t}, {self.r}")
        if self.g + self.t + self.r != self.N:
            raise ValueError(f"g + t + r = {self.g + self.t + self.r} != N = {self.N}")

    @property
    def trace(self) -> int:
        return self.N

    @property
    def det(self) -> int:
        """The determinant t*g of the counting transfer matrix."""
        return self.t * self.g

    def probability_system(self) -> "MarkovCarrySystem":
        """The carry chain under uniform digits."""
        return MarkovCarrySystem.from_gen_prop_kill(
            Fraction(self.g, self.N), Fraction(self.t, self.N), Fraction(self.r, self.N), N=self.N)


@dataclass(frozen=True)
class CascadeSpec:
    source: HolteSystem | BinaryChain
    forbidden: frozenset[int]
    kept: tuple[int, ...]         # kept states in original order
    restricted_count: RatMatrix   # principal submatrix on kept states

    @property
    def d(self) -> int:
        return len(self.kept)


@dataclass
class ThresholdVerdict:
    kind: str                       # GEOMETRIC, CHEBYSHEV, NO_CHEBYSHEV or UNDETERMINED
    d: int
    parameters: dict = field(default_factory=dict)
    charpoly: RatPolynomial | None = None
    h1: bool | None = None          # gcd(chi, chi') constant
    h2: bool | None = None          # gcd(P, Q) constant
    reduced_degree: int | None = None
    in_table_coverage: bool = True
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class ModuliPoint:
    N: int
    d: int
    status: str                               # ACHIEVABLE, AMGM_ONLY_EXCLUDED or BELOW_AMGM
    witness: tuple[int, int] | None = None    # (g, t) when achievable


@dataclass(frozen=True)
class MarkovCarrySystem:
    k: int
    N: int
    matrix: RatMatrix   # column-stochastic [outgoing, incoming]

    def __post_init__(self):
        if (self.matrix.rows, self.matrix.cols) != (self.k, self.k):
            raise ValueError(f"expected a {self.k}x{self.k} matrix")
        if any(e < 0 or e > 1 for e in self.matrix.entries):
            raise ValueError("transition probabilities must lie in [0, 1]")

    @classmethod
    def from_gen_prop_kill(cls, g, t, l, N: int | None = None) -> "MarkovCarrySystem":
        """Two-state chain [[l+t, l], [g, g+t]] from GEN/PROP/KILL probabilities."""
        g, t, l = Fraction(g), Fraction(t), Fraction(l)
        if g + t + l != 1:
            raise ValueError(f"g + t + l = {g + t + l}, expected 1")
        if N is None:
            N = math.lcm(g.denominator, t.denominator, l.denominator)
        return cls(k=2, N=N, matrix=RatMatrix.from_rows([[l + t, l], [g, g + t]]))


@dataclass
class CheckResult:
    name: str
    anchor: str      # the identity or table the check reproduces
    status: str      # PASS, FAIL or SKIP
    detail: str = ""
    k: int | None = None
    N: int | None = None


@dataclass
class VerifyReport:
    grid_kmax: int
    grid_bases: list[int] = field(default_factory=list)
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failed


@dataclass
class RunConfig:
    command: str
    k: int | None = None
    base: int | None = None
    forbid: tuple[int, ...] = ()
    length: int | None = None
    grid_kmax: int = 5
    grid_bases: tuple[int, ...] = (2, 3)
    budget: int = 10**7
    fmt: str = "text"            # json, csv, text or bfile
    out: str | None = None
