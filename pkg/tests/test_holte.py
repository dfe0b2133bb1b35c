from fractions import Fraction

import pytest

from carry_spectra import BudgetExceeded
from carry_spectra.exactnum import RatMatrix, RatPolynomial, characteristic_polynomial
from carry_spectra.holte import (
    brute_force_count_matrix, build_holte, check_centrosymmetry, digit_sum_counts,
    expected_charpoly, first_moment_identity, interlacing_certificate, interlacing_holds,
    is_log_concave, is_oscillatory, is_totally_nonnegative, profile_is_symmetric,
    restricted_charpoly, reversibility_defect, stationary_distribution, verify_eigenvalues,
    verify_return_count, verify_stationarity, verify_stationarity_identity, verify_uniform_residue,
)

from conftest import sympy_charpoly

GRID = [(k, N) for k in range(2, 6) for N in (2, 3, 5)]


# --- Digit-sum profile ---

def test_digit_sum_counts_small():
    assert digit_sum_counts(1, 5).counts == (1, 1, 1, 1, 1)
    assert digit_sum_counts(2, 2).counts == (1, 2, 1)
    assert digit_sum_counts(4, 2).counts == (1, 4, 6, 4, 1)
    assert digit_sum_counts(2, 3).counts == (1, 2, 3, 2, 1)


@pytest.mark.parametrize("k,N", GRID)
def test_profile_shape(k, N):
    profile = digit_sum_counts(k, N)
    assert len(profile.counts) == k * (N - 1) + 1
    assert sum(profile.counts) == N ** k
    assert profile_is_symmetric(profile)
    assert is_log_concave(profile)


def test_digit_sum_rejects_bad_base():
    with pytest.raises(ValueError):
        digit_sum_counts(3, 1)


# --- Count matrix ---

def test_build_holte_k2_binary(holte_2_2):
    assert holte_2_2.count_matrix == RatMatrix.from_rows([[3, 1], [1, 3]])


def test_build_holte_k4_binary(holte_4_2):
    assert holte_4_2.count_matrix == RatMatrix.from_rows([
        [5, 1, 0, 0],
        [10, 10, 5, 1],
        [1, 5, 10, 10],
        [0, 0, 1, 5],
    ])
    assert holte_4_2.prob_matrix[1, 0] == Fraction(10, 16)


@pytest.mark.parametrize("k,N", [(k, N) for k in range(2, 6) for N in range(2, 5)])
def test_columns_sum_to_digit_tuples(k, N):
    t = build_holte(k, N).count_matrix
    assert all(sum(t.column(c)) == N ** k for c in range(k))
    assert all(sum(build_holte(k, N).prob_matrix.column(c)) == 1 for c in range(k))


@pytest.mark.parametrize("k,N", [(k, N) for k in range(2, 5) for N in (2, 3)])
def test_closed_form_matches_simulation(k, N):
    assert brute_force_count_matrix(k, N) == build_holte(k, N).count_matrix


def test_simulation_budget():
    with pytest.raises(BudgetExceeded):
        brute_force_count_matrix(9, 5)


@pytest.mark.parametrize("k,N", [(1, 2), (3, 1)])
def test_build_holte_rejects_degenerate(k, N):
    with pytest.raises(ValueError):
        build_holte(k, N)


# --- Spectrum and stationarity ---

@pytest.mark.parametrize("k,N", GRID + [(6, 2), (6, 3)])
def test_eigenvalues_are_powers_of_base(k, N):
    assert verify_eigenvalues(build_holte(k, N))


@pytest.mark.parametrize("k,N", [(3, 2), (4, 3), (5, 2)])
def test_expected_charpoly_agrees_with_sympy(k, N):
    assert sympy_charpoly(build_holte(k, N).count_matrix) == expected_charpoly(k, N)


def test_stationary_distribution_values():
    assert stationary_distribution(2) == (Fraction(1, 2), Fraction(1, 2))
    assert stationary_distribution(5) == tuple(Fraction(a, 120) for a in (1, 26, 66, 26, 1))
    with pytest.raises(ValueError):
        stationary_distribution(1)


@pytest.mark.parametrize("k,N", GRID)
def test_stationarity(k, N):
    assert verify_stationarity(build_holte(k, N))
    assert verify_stationarity_identity(k, N)


@pytest.mark.parametrize("k,N", GRID)
def test_centrosymmetric(k, N):
    assert check_centrosymmetry(build_holte(k, N))


def test_centrosymmetry_detects_perturbation():
    m = RatMatrix.from_rows([[3, 1], [2, 3]])
    assert not check_centrosymmetry(m)


def test_return_count_examples(holte_2_2):
    assert (holte_2_2.count_matrix.power(2))[0, 0] == 10
    assert verify_return_count(holte_2_2, 4)
    assert verify_return_count(build_holte(5, 3), 3)
    with pytest.raises(ValueError):
        verify_return_count(holte_2_2, 0)


@pytest.mark.parametrize("k,N", GRID)
def test_first_moment(k, N):
    assert first_moment_identity(build_holte(k, N))


# --- Total positivity ---

def test_total_nonnegativity_small():
    assert is_totally_nonnegative(RatMatrix.identity(3))
    assert is_totally_nonnegative(RatMatrix.from_rows([[3, 1], [1, 3]]))
    assert not is_totally_nonnegative(RatMatrix.from_rows([[0, 1], [1, 0]]))


def test_minor_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        is_totally_nonnegative(RatMatrix.identity(9))


@pytest.mark.parametrize("k,N", [(3, 2), (4, 2), (4, 3), (5, 2)])
def test_count_matrix_oscillatory(k, N):
    sys = build_holte(k, N)
    assert is_oscillatory(sys.count_matrix)
    assert is_oscillatory(sys.count_matrix.principal(range(k - 1)))


def test_identity_not_oscillatory():
    assert not is_oscillatory(RatMatrix.identity(3))


# --- Reversibility ---

def test_reversibility_defect_k4_binary(holte_4_2):
    defects = reversibility_defect(holte_4_2)
    assert (0, 1, (Fraction(10, 384), Fraction(11, 384))) in defects


@pytest.mark.parametrize("N", [2, 3, 5])
def test_small_chains_are_reversible(N):
    assert reversibility_defect(build_holte(2, N)) == []
    assert reversibility_defect(build_holte(3, N)) == []


@pytest.mark.parametrize("k,N", [(4, 3), (5, 2)])
def test_larger_chains_are_not_reversible(k, N):
    assert reversibility_defect(build_holte(k, N))


# --- Uniform residues ---

@pytest.mark.parametrize("k,N,c", [(1, 2, 0), (2, 3, 1), (3, 5, 2), (4, 2, 3), (5, 3, 4)])
def test_uniform_residue(k, N, c):
    assert verify_uniform_residue(k, N, c)


def test_uniform_residue_budget():
    with pytest.raises(BudgetExceeded):
        verify_uniform_residue(21, 2, 0)


# --- Interlacing ---

def test_restricted_charpoly_k4_binary(holte_4_2, k4_cubic):
    assert restricted_charpoly(holte_4_2) == k4_cubic


def test_interlacing_certificate_k4_binary(holte_4_2):
    assert interlacing_certificate(holte_4_2) == [56, -48, 44, -42]
    assert interlacing_holds(holte_4_2)


@pytest.mark.parametrize("k,N", GRID)
def test_interlacing_everywhere(k, N):
    assert interlacing_holds(build_holte(k, N))


def test_restricted_charpoly_k2_is_linear(holte_2_2):
    assert restricted_charpoly(holte_2_2) == RatPolynomial.of(-3, 1)
    assert characteristic_polynomial(holte_2_2.count_matrix) == RatPolynomial.of(8, -6, 1)
