import random
from fractions import Fraction

import pytest

from carry_spectra import (ACHIEVABLE, AMGM_ONLY_EXCLUDED, BELOW_AMGM, BinaryChain,
                           BudgetExceeded, MarkovCarrySystem)
from carry_spectra.classify import (
    achievable_witness, chain_charpoly, classify_general, discriminant_is_square,
    moduli_point, moduli_space, mult_shadow_search, shadow_equivalent_binary, sigma,
    similarity_witness, stochasticity_check,
)
from carry_spectra.exactnum import (RatMatrix, RatPolynomial, characteristic_polynomial, determinant,
                                    inverse)
from carry_spectra.holte import build_holte

F = Fraction


@pytest.fixture
def example_systems():
    return {
        "a": MarkovCarrySystem.from_gen_prop_kill(F(1, 3), F(1, 3), F(1, 3)),
        "b": MarkovCarrySystem.from_gen_prop_kill(F(1, 2), F(1, 4), F(1, 4)),
        "c": MarkovCarrySystem.from_gen_prop_kill(F(1, 4), F(1, 2), F(1, 4)),
        "d": MarkovCarrySystem.from_gen_prop_kill(F(1, 6), F(1, 2), F(1, 3)),
    }


def _random_chain(rng, n_max=6):
    N = rng.randint(1, n_max)
    g = rng.randint(0, N)
    t = rng.randint(0, N - g)
    return BinaryChain(N=N, g=g, t=t, r=N - g - t)


# --- Binary chains ---

def test_chain_charpoly():
    assert chain_charpoly(BinaryChain(N=3, g=1, t=1, r=1)) == RatPolynomial.of(1, -3, 1)


def test_binary_equivalence_examples():
    assert shadow_equivalent_binary(BinaryChain(6, 2, 1, 3), BinaryChain(6, 1, 2, 3))
    assert not shadow_equivalent_binary(BinaryChain(6, 2, 3, 1), BinaryChain(6, 1, 1, 4))
    assert not shadow_equivalent_binary(BinaryChain(3, 1, 1, 1), BinaryChain(4, 1, 1, 2))


def test_binary_equivalence_is_equivalence_relation():
    rng = random.Random(11)
    chains = [_random_chain(rng) for _ in range(40)]
    for x in chains:
        assert shadow_equivalent_binary(x, x)
        for y in chains:
            assert shadow_equivalent_binary(x, y) == shadow_equivalent_binary(y, x)
            for z in chains[:10]:
                if shadow_equivalent_binary(x, y) and shadow_equivalent_binary(y, z):
                    assert shadow_equivalent_binary(x, z)


def test_binary_equivalence_matches_charpoly():
    rng = random.Random(3)
    for _ in range(100):
        x, y = _random_chain(rng), _random_chain(rng)
        assert shadow_equivalent_binary(x, y) == (chain_charpoly(x) == chain_charpoly(y))


def test_probability_system_trace_and_det():
    for chain in (BinaryChain(6, 2, 1, 3), BinaryChain(5, 0, 5, 0), BinaryChain(4, 1, 2, 1)):
        m = chain.probability_system().matrix
        assert m.trace() == 1 + F(chain.t, chain.N)
        assert determinant(m) == F(chain.t, chain.N)
        assert stochasticity_check(m)
    assert BinaryChain(6, 2, 1, 3).probability_system().N == 6


def test_binary_equivalence_rejects_mixed(example_systems):
    with pytest.raises(ValueError):
        shadow_equivalent_binary(BinaryChain(3, 1, 1, 1), example_systems["a"])


# --- Two-state probability systems ---

def test_example_system_charpolys(example_systems):
    chi = {name: characteristic_polynomial(s.matrix) for name, s in example_systems.items()}
    assert chi["a"] == RatPolynomial.of(F(1, 3), F(-4, 3), 1)
    assert chi["b"] == RatPolynomial.of(F(1, 4), F(-5, 4), 1)
    assert chi["c"] == chi["d"] == RatPolynomial.of(F(1, 2), F(-3, 2), 1)


def test_example_system_classes(example_systems):
    s = example_systems
    assert classify_general(s["c"], s["d"])
    assert shadow_equivalent_binary(s["c"], s["d"])
    for x, y in [("a", "b"), ("a", "c"), ("b", "d")]:
        assert not classify_general(s[x], s[y])
        assert not shadow_equivalent_binary(s[x], s[y])


def test_from_gen_prop_kill_validates():
    with pytest.raises(ValueError):
        MarkovCarrySystem.from_gen_prop_kill(F(1, 2), F(1, 2), F(1, 2))
    system = MarkovCarrySystem.from_gen_prop_kill(F(1, 6), F(1, 2), F(1, 3))
    assert system.N == 6


def test_general_agrees_with_binary_on_simple_spectra():
    rng = random.Random(5)
    systems = []
    while len(systems) < 30:
        den = rng.randint(2, 8)
        g, t = rng.randint(0, den), rng.randint(0, den)
        if g + t > den or t == den:
            continue
        systems.append(MarkovCarrySystem.from_gen_prop_kill(F(g, den), F(t, den), F(den - g - t, den)))
    for x in systems:
        for y in systems:
            assert classify_general(x, y) == shadow_equivalent_binary(x, y)


def test_general_rejects_repeated_roots():
    with pytest.raises(ValueError):
        classify_general(RatMatrix.identity(2), RatMatrix.identity(2))


def test_general_on_holte_chains():
    p = build_holte(3, 2).prob_matrix
    assert classify_general(p, p)
    assert characteristic_polynomial(p) == RatPolynomial.from_roots([1, F(1, 2), F(1, 4)])
    assert not classify_general(p, build_holte(3, 3).prob_matrix)


# --- Stochasticity and similarity ---

def test_stochasticity(example_systems):
    assert all(stochasticity_check(s) for s in example_systems.values())
    assert stochasticity_check(build_holte(4, 3).prob_matrix)
    assert not stochasticity_check(RatMatrix.from_rows([[F(1, 2), F(1, 2)], [F(1, 4), F(1, 2)]]))


def test_similarity_witness(example_systems):
    c, d = example_systems["c"].matrix, example_systems["d"].matrix
    w = similarity_witness(c, d)
    assert w is not None
    assert w * c * inverse(w) == d
    assert similarity_witness(example_systems["a"], example_systems["c"]) is None


def test_similarity_witness_irrational_spectrum():
    a = RatMatrix.from_rows([[0, 2], [1, 0]])
    b = RatMatrix.from_rows([[0, 1], [2, 0]])
    assert classify_general(a, b)
    assert similarity_witness(a, b) is None
    assert not discriminant_is_square(a)


def test_discriminant_square(example_systems):
    assert discriminant_is_square(example_systems["c"])
    assert discriminant_is_square(example_systems["a"])


# --- Moduli space ---

@pytest.mark.parametrize("d,expected", [(1, 2), (7, 8), (12, 7), (13, 14), (36, 12)])
def test_sigma(d, expected):
    assert sigma(d) == expected


def test_sigma_rejects_zero():
    with pytest.raises(ValueError):
        sigma(0)


def test_achievable_witness():
    assert achievable_witness(9, 14) == (2, 7)
    assert achievable_witness(6, 7) is None
    assert achievable_witness(1, 0) == (0, 0)


def test_moduli_points():
    assert moduli_point(6, 7).status == AMGM_ONLY_EXCLUDED
    assert moduli_point(9, 14) == moduli_point(9, 14)
    assert moduli_point(9, 14).status == ACHIEVABLE
    assert moduli_point(8, 13).status == AMGM_ONLY_EXCLUDED
    assert moduli_point(3, 3).status == BELOW_AMGM


def test_sigma_criterion_matches_search():
    for N in range(2, 51):
        for d in range(1, 201):
            search = any(d % g == 0 and g + d // g <= N for g in range(1, N + 1))
            assert (moduli_point(N, d).status == ACHIEVABLE) == search
            if search:
                assert N * N >= 4 * d


def _row(points, N):
    return {p.d: p.status for p in points if p.N == N}


def test_moduli_rows():
    points = moduli_space(12, 21)
    assert len(points) == 12 * 22
    row5 = _row(points, 5)
    assert [d for d, s in row5.items() if s == ACHIEVABLE] == [0, 1, 2, 3, 4, 6]
    assert [d for d, s in row5.items() if s == AMGM_ONLY_EXCLUDED] == [5]
    row12 = _row(points, 12)
    assert [d for d, s in row12.items() if s == AMGM_ONLY_EXCLUDED] == [13, 17, 19]
    assert BELOW_AMGM not in row12.values()


def test_moduli_space_bounds():
    with pytest.raises(ValueError):
        moduli_space(0, 5)


# --- Multiplicative shadow ---

def test_mult_shadow_binary_length_two_is_empty():
    assert mult_shadow_search(2, 2) == []


@pytest.mark.parametrize("N,count", [(2, 2), (3, 6)])
def test_mult_shadow_single_digit(N, count):
    witnesses = mult_shadow_search(N, 1)
    assert len(witnesses) == count


def test_mult_shadow_identity_encoding():
    h, g = next(w for w in mult_shadow_search(2, 1) if w[0] == ((0,), (1,)))
    assert g == {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}


def test_mult_shadow_budget():
    with pytest.raises(BudgetExceeded):
        mult_shadow_search(3, 2)
