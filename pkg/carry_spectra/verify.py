"""The identity suite behind `carry-spectra verify`: every exact identity over a (k, N) grid."""

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import factorial
from typing import Callable

from . import (BinaryChain, BudgetExceeded, CheckResult, IdentityViolation, InexactDivision,
               MarkovCarrySystem, CHEBYSHEV, NO_CHEBYSHEV, PASS, FAIL, SKIP, VerifyReport,
               ACHIEVABLE, AMGM_ONLY_EXCLUDED, BELOW_AMGM)
from . import cascade, classify, eigensys, holte
from .exactnum import (RatPolynomial, characteristic_polynomial, determinant, elementary_symmetric,
                       eulerian, eulerian_explicit, eulerian_row, fibonacci, poly_gcd,
                       rational_roots, stirling_first_row, stirling_first_unsigned, verify_worpitzky)

logger = logging.getLogger(__name__)

DEFAULT_GRID_KMAX = 5
DEFAULT_GRID_BASES = (2, 3)
RETURN_POWERS = 3
RECURRENCE_LENGTH = 30
ORACLE_LENGTH = 2
MODULI_N_MAX = 30
MODULI_D_MAX = 120
CHAIN_N_MAX = 6

K4_SEQUENCE = (1, 16, 255, 4015, 62780, 978425, 15226125, 236791400)

Check = tuple[str, str, int | None, int | None, Callable[[], bool]]


def _run_one(check: Check) -> CheckResult:
    name, anchor, k, N, fn = check
    try:
        ok = fn()
    except BudgetExceeded as e:
        return CheckResult(name=name, anchor=anchor, status=SKIP, detail=str(e), k=k, N=N)
    except (IdentityViolation, InexactDivision) as e:
        return CheckResult(name=name, anchor=anchor, status=FAIL, detail=str(e), k=k, N=N)
    return CheckResult(name=name, anchor=anchor, status=PASS if ok else FAIL, k=k, N=N)


def _corrupted_stirling_weights(k: int) -> list[int]:
    weights = [stirling_first_unsigned(k, k - j) for j in range(k)]
    weights[-1] += 1
    return weights


def _pair_checks(k: int, N: int, budget: int, corrupt_stirling: bool) -> list[Check]:
    sys = holte.build_holte(k, N)
    top = cascade.restrict(sys, {k - 1})
    weights = _corrupted_stirling_weights(k) if corrupt_stirling else None

    def column_sums():
        return all(sum(sys.count_matrix.column(c)) == N ** k for c in range(k))

    def brute_force_matrix():
        return holte.brute_force_count_matrix(k, N) == sys.count_matrix

    def stirling_lagrange():
        direct = characteristic_polynomial(top.restricted_count)
        return cascade.stirling_lagrange_charpoly(k, N, weights=weights) == direct

    def det_formula():
        return cascade.det_restricted_formula(k, N) == determinant(top.restricted_count)

    def constant_term():
        chi = cascade.stirling_lagrange_charpoly(k, N)
        return chi.coefficient(0) == (-1) ** (k - 1) * cascade.det_restricted_formula(k, N)

    def reversibility():
        defects = holte.reversibility_defect(sys)
        if k <= 3:
            return defects == []
        if (k, N) == (4, 2):
            return (0, 1, (Fraction(10, 384), Fraction(11, 384))) in defects
        return bool(defects)

    def restricted_oscillatory():
        return holte.is_oscillatory(top.restricted_count)

    def nonvanishing_residues():
        P, Q = cascade.avoidance_generating_function(top)
        return poly_gcd(P, Q).is_constant()

    def oracle():
        return (cascade.avoidance_brute_force(k, N, {k - 1}, ORACLE_LENGTH, budget=budget)
                == cascade.avoidance_count(top, ORACLE_LENGTH))

    def recurrence():
        return cascade.recurrence_sequence(top, RECURRENCE_LENGTH) == \
            cascade.avoidance_sequence(top, RECURRENCE_LENGTH)

    def two_state_chebyshev():
        pair = top if k == 3 else cascade.restrict(sys, {2, 3})
        return (cascade.threshold_classify(pair).kind == CHEBYSHEV
                and cascade.chebyshev_check(pair, RECURRENCE_LENGTH))

    profile = holte.digit_sum_counts(k, N)

    checks: list[Check] = [
        ("column sums", "holte-entry", k, N, column_sums),
        ("digit-sum profile symmetry", "digit-sum-profile", k, N,
         lambda: holte.profile_is_symmetric(profile) and sum(profile.counts) == N ** k),
        ("digit-sum profile log-concavity", "digit-sum-profile", k, N, lambda: holte.is_log_concave(profile)),
        ("count matrix by simulation", "holte-entry", k, N, brute_force_matrix),
        ("stationarity T pi = pi", "eulerian-stationary", k, N, lambda: holte.verify_stationarity(sys)),
        ("Eulerian window sum", "worpitzky", k, N, lambda: holte.verify_stationarity_identity(k, N)),
        ("centrosymmetry", "centrosymmetry", k, N, lambda: holte.check_centrosymmetry(sys)),
        ("return count", "return-count", k, N, lambda: holte.verify_return_count(sys, RETURN_POWERS)),
        ("spectrum N^(k-j)", "holte-spectrum", k, N, lambda: holte.verify_eigenvalues(sys)),
        ("first moment", "carry-mean", k, N, lambda: holte.first_moment_identity(sys)),
        ("uniform residue", "uniform-residue", k, N,
         lambda: all(holte.verify_uniform_residue(k, N, c) for c in range(k))),
        ("total nonnegativity", "oscillatory", k, N, lambda: holte.is_totally_nonnegative(sys.count_matrix)),
        ("oscillatory", "oscillatory", k, N, lambda: holte.is_oscillatory(sys.count_matrix)),
        ("reversibility defect", "non-reversibility", k, N, reversibility),
        ("eigen equations", "biorthogonal-system", k, N, lambda: eigensys.verify_eigen_equations(k, N)),
        ("spectral projectors", "spectral-expansion", k, N, lambda: eigensys.verify_projectors(k, N)),
        ("spectral return", "spectral-return", k, N,
         lambda: eigensys.verify_spectral_return_identity(k, N, RETURN_POWERS)),
        ("Stirling-Lagrange charpoly", "stirling-lagrange", k, N, stirling_lagrange),
        ("restricted determinant", "det-restricted", k, N, det_formula),
        ("charpoly constant term", "det-restricted", k, N, constant_term),
        ("generating function", "transfer-matrix", k, N, lambda: cascade.verify_generating_function(top)),
        ("characteristic recurrence", "transfer-matrix", k, N, recurrence),
        ("avoidance oracle", "transfer-matrix", k, N, oracle),
        ("interlacing", "interlacing", k, N, lambda: holte.interlacing_holds(sys)),
    ]
    if k >= 3:
        checks.append(("restricted oscillatory", "oscillatory", k, N, restricted_oscillatory))
    if k in (3, 4):
        checks.append(("two-state restriction Chebyshev", "chebyshev-representation", k, N,
                       two_state_chebyshev))
    if k >= 4:
        checks.append(("non-vanishing residues", "nonzero-residues", k, N, nonvanishing_residues))
    return checks


def _k_checks(k: int) -> list[Check]:
    def n_independence():
        return all(eigensys.right_eigenvector(k, j, 2, 3) == eigensys.right_eigenvector(k, j, 3, 2)
                   for j in range(k))

    def normalization():
        return eigensys.normalization_constants(k) == tuple(
            eigensys.stirling_constant(k, j) for j in range(k))

    def eulerian_symmetry():
        row = eulerian_row(k)
        return row == tuple(reversed(row))

    def eulerian_closed_form():
        return all(eulerian_explicit(k, i) == eulerian(k, i) for i in range(k))

    def esym_is_stirling():
        return all(elementary_symmetric(j, range(1, k)) == stirling_first_unsigned(k, k - j)
                   for j in range(k))

    checks: list[Check] = [
        ("Worpitzky", "worpitzky", k, None, lambda: verify_worpitzky(k, 20)),
        ("Eulerian row sum", "eulerian", k, None,
         lambda: sum(eulerian_row(k)) == factorial(k)),
        ("Eulerian symmetry", "eulerian", k, None, eulerian_symmetry),
        ("Eulerian explicit formula", "eulerian", k, None, eulerian_closed_form),
        ("Stirling row sum", "stirling-eulerian", k, None, lambda: sum(stirling_first_row(k)) == factorial(k)),
        ("e_j(1..k-1) = |s(k, k-j)|", "stirling-eulerian", k, None, esym_is_stirling),
        ("biorthogonality", "biorthogonal-system", k, None, lambda: eigensys.verify_biorthogonality(k)),
        ("c_kj sum", "stirling-eulerian", k, None, lambda: eigensys.verify_ckj_sum(k)),
        ("c_kj three ways", "stirling-eulerian", k, None, normalization),
        ("left eigenvectors entrywise", "stirling-eulerian", k, None, lambda: eigensys.verify_left_entrywise(k)),
        ("left moment vanishing", "palindromic-quotients", k, None,
         lambda: eigensys.verify_left_moment_vanishing(k)),
        ("N-independence", "holte-spectrum", k, None, n_independence),
        ("reversal symmetry", "binomial-palindromic", k, None, lambda: eigensys.verify_reversal_symmetry(k)),
        ("quotient palindromes", "binomial-palindromic", k, None, lambda: eigensys.verify_quotients(k)),
    ]
    if k >= 4:
        checks.append(("Q_2 closed form", "quotient-closed-forms", k, None,
                       lambda: eigensys.quotient_polynomial(k, 2) == eigensys.q2_closed_form(k)))
        checks.append(("Q_2 deviation 8x/(3k-1)", "quotient-closed-forms", k, None,
                       lambda: eigensys.quotient_deviation(k, 2) == RatPolynomial.of(0, Fraction(8, 3 * k - 1))))
    if k >= 5:
        checks.append(("Q_3 closed form", "quotient-closed-forms", k, None,
                       lambda: eigensys.quotient_polynomial(k, 3) == eigensys.q3_closed_form(k)))
        checks.append(("Q_3 deviation 8x(1-x)/k", "quotient-closed-forms", k, None,
                       lambda: eigensys.quotient_deviation(k, 3) == RatPolynomial.of(0, Fraction(8, k), Fraction(-8, k))))
    return checks


def _global_checks(budget: int) -> list[Check]:
    def k4_sequence():
        spec = cascade.top_restriction(4, 2)
        return (tuple(cascade.avoidance_sequence(spec, 7)) == K4_SEQUENCE
                and tuple(cascade.recurrence_sequence(spec, 7)) == K4_SEQUENCE)

    def k4_verdict():
        spec = cascade.top_restriction(4, 2)
        verdict = cascade.threshold_classify(spec)
        chi = characteristic_polynomial(spec.restricted_count)
        return (verdict.kind == NO_CHEBYSHEV and verdict.h1 and verdict.h2
                and verdict.reduced_degree == 3 and not rational_roots(chi))

    def k3_two_state_row():
        spec = cascade.top_restriction(3, 2)
        verdict = cascade.threshold_classify(spec)
        return (verdict.kind == CHEBYSHEV
                and characteristic_polynomial(spec.restricted_count) == RatPolynomial.of(20, -10, 1)
                and verdict.parameters["shift"] == -2
                and cascade.avoidance_sequence(spec, 2) == [1, 8, 60])

    def k4_two_state_row():
        spec = cascade.restrict(holte.build_holte(4, 2), {2, 3})
        verdict = cascade.threshold_classify(spec)
        return (verdict.kind == CHEBYSHEV
                and characteristic_polynomial(spec.restricted_count) == RatPolynomial.of(40, -15, 1)
                and verdict.parameters["shift"] == 0
                and cascade.chebyshev_check(spec, RECURRENCE_LENGTH))

    def fibonacci_bisection():
        chain = cascade.doubling_chain(3)
        return (cascade.chebyshev_check(chain, 20)
                and all(cascade.avoidance_count(chain, L) == fibonacci(2 * L + 2) for L in range(21)))

    def binary_oracle():
        chain = BinaryChain(N=3, g=1, t=1, r=1)
        return all(cascade.chain_brute_force(chain, L, budget=budget) == cascade.avoidance_count(chain, L)
                   for L in range(8))

    def poisson_point():
        chain = cascade.doubling_chain(3)
        return cascade.dispersion_index(chain) == 1 and cascade.is_poisson(chain)

    def moduli_gap():
        return classify.sigma(7) == 8 and classify.moduli_point(6, 7).status == AMGM_ONLY_EXCLUDED

    def sigma_criterion():
        for N in range(1, MODULI_N_MAX + 1):
            for d in range(1, MODULI_D_MAX + 1):
                search = any(d % g == 0 and g + d // g <= N for g in range(1, N + 1))
                achievable = classify.moduli_point(N, d).status == ACHIEVABLE
                if not achievable == search == (classify.sigma(d) <= N):
                    return False
        return True

    def amgm_bound():
        for point in classify.moduli_space(MODULI_N_MAX, MODULI_D_MAX):
            below = point.N * point.N < 4 * point.d
            if (point.status == BELOW_AMGM) != below:
                return False
        return True

    def probability_chains():
        for N in range(1, CHAIN_N_MAX + 1):
            for g in range(N + 1):
                for t in range(N + 1 - g):
                    m = BinaryChain(N=N, g=g, t=t, r=N - g - t).probability_system().matrix
                    mu = Fraction(t, N)
                    if m.trace() != 1 + mu or determinant(m) != mu:
                        return False
        return True

    def example_systems():
        a = MarkovCarrySystem.from_gen_prop_kill(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
        b = MarkovCarrySystem.from_gen_prop_kill(Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
        c = MarkovCarrySystem.from_gen_prop_kill(Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))
        d = MarkovCarrySystem.from_gen_prop_kill(Fraction(1, 6), Fraction(1, 2), Fraction(1, 3))
        return (classify.classify_general(c, d) and not classify.classify_general(a, b)
                and not classify.classify_general(b, c) and not classify.classify_general(a, c))

    def multiplicative():
        return classify.mult_shadow_search(2, 2) == []

    return [
        ("k=4 cascade-free sequence", "cascade-free-sequence", None, None, k4_sequence),
        ("k=4 threshold verdict", "chebyshev-threshold", None, None, k4_verdict),
        ("k=3 two-state row", "chebyshev-threshold", None, None, k3_two_state_row),
        ("k=4 two-state row", "chebyshev-threshold", None, None, k4_two_state_row),
        ("Fibonacci bisection", "chebyshev-representation", None, None, fibonacci_bisection),
        ("binary chain oracle", "transfer-matrix", None, None, binary_oracle),
        ("Poisson point", "dispersion", None, None, poisson_point),
        ("moduli gap (6, 7)", "moduli-space", None, None, moduli_gap),
        ("sigma criterion", "moduli-space", None, None, sigma_criterion),
        ("AM-GM bound", "moduli-space", None, None, amgm_bound),
        ("uniform-digit probability chains", "stochastic-classification", None, None, probability_chains),
        ("shadow classes", "stochastic-classification", None, None, example_systems),
        ("multiplicative shadow", "multiplicative-shadow", None, None, multiplicative),
    ]


def build_checks(grid_kmax: int = DEFAULT_GRID_KMAX, grid_bases=DEFAULT_GRID_BASES,
                 budget: int = cascade.DEFAULT_BRUTE_FORCE_BUDGET,
                 corrupt_stirling: bool = False) -> list[Check]:
    if grid_kmax < 2:
        raise ValueError(f"grid k max must be >= 2, got {grid_kmax}")
    if any(N < 2 for N in grid_bases):
        raise ValueError(f"grid bases must be >= 2, got {list(grid_bases)}")
    checks: list[Check] = []
    for k in range(2, grid_kmax + 1):
        checks += _k_checks(k)
        for N in grid_bases:
            checks += _pair_checks(k, N, budget, corrupt_stirling)
    checks += _global_checks(budget)
    return checks


def run_checks(grid_kmax: int = DEFAULT_GRID_KMAX, grid_bases=DEFAULT_GRID_BASES,
               budget: int = cascade.DEFAULT_BRUTE_FORCE_BUDGET, workers: int = 1,
               corrupt_stirling: bool = False) -> VerifyReport:
    """Run every check; results are sorted by (k, N, name) whatever the worker count."""
    checks = build_checks(grid_kmax, grid_bases, budget, corrupt_stirling)
    logger.debug("running %d checks on %d worker(s)", len(checks), workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, checks))
    else:
        results = [_run_one(c) for c in checks]
    results.sort(key=lambda r: (r.k or 0, r.N or 0, r.name))
    for r in results:
        if r.status == FAIL:
            logger.warning("check failed: %s [%s] k=%s N=%s %s", r.name, r.anchor, r.k, r.N, r.detail)
    return VerifyReport(grid_kmax=grid_kmax, grid_bases=list(grid_bases), checks=results)
