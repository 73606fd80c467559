import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distinguish.combinatorics import enumerate_occupations
from distinguish.errors import SizeCapError, TransformMismatchError
from distinguish.optics import qft, random_interferometer
from distinguish.scattering import (
    IrrepEngine,
    classical_probability,
    enumerate_outcomes,
    indistinguishable_probability,
    is_bunched,
    named_distribution,
    oracle_distribution,
    outcome_probabilities,
    outcome_probability,
    outcome_probability_oracle,
)
from distinguish.states import named_state, rho_from_fock_array


def singly_array(N, b):
    A = np.zeros((N, 2), dtype=int)
    A[:, 0] = 1
    A[b - 1] = [0, 1]
    return A


def fock_arrays(N, dS, dL):
    """Every Fock array with N photons on a dS x dL grid, up to nothing."""
    for occ in enumerate_occupations(N, dS * dL):
        yield np.array(occ).reshape(dS, dL)


def test_hong_ou_mandel():
    i = outcome_probability(named_state("i", 2), qft(2), (1, 1))
    d = outcome_probability(named_state("d", 2), qft(2), (1, 1))
    assert abs(i.p_total) < 1e-12
    assert abs(d.p_total - 0.5) < 1e-12
    assert abs(d.per_irrep[(1, 1)] - 0.5) < 1e-12


def test_outcome_listing():
    assert enumerate_outcomes(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert enumerate_outcomes(3, 3, exclude_bunched=True)[0] == (2, 1, 0)
    assert is_bunched((0, 3, 0)) and not is_bunched((2, 0, 1))


@pytest.mark.parametrize("kind, N", [(k, N) for k in ("i", "s", "d", "sm") for N in (2, 3, 4)])
def test_normalisation(kind, N, rng):
    U = random_interferometer(N, rng)
    rows = outcome_probabilities(named_state(kind, N), U)
    assert abs(sum(r.p_total for r in rows) - 1) < 1e-12
    assert all(r.p_total >= 0 for r in rows)
    for r in rows:
        assert abs(sum(r.per_irrep.values()) - r.p_total) < 1e-14


@pytest.mark.parametrize("N", [2, 3, 4])
def test_irrep_mass_is_conserved(N, rng):
    # U acts inside each irrep, so each irrep's total outcome mass equals its weight
    state = named_state("sm", N)
    U = random_interferometer(N, rng)
    rows = outcome_probabilities(state, U)
    for lam, w in state.weights.items():
        assert abs(sum(r.per_irrep[lam] for r in rows) - w) < 1e-12


def test_bunched_outcomes_only_symmetric(rng):
    U = random_interferometer(4, rng)
    for r in outcome_probabilities(named_state("d", 4), U):
        if is_bunched(r.occ):
            assert all(abs(v) < 1e-14 for lam, v in r.per_irrep.items() if lam != (4,))


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_named_routes_agree(N, rng):
    U = random_interferometer(N, rng)
    for kind in ("i", "d", "sm"):
        irrep = {r.occ: r.p_total for r in outcome_probabilities(named_state(kind, N), U)}
        perm = named_distribution(kind, U)
        assert max(abs(irrep[o] - perm[o]) for o in irrep) < 1e-10
    for b in range(1, N + 1):
        irrep = {r.occ: r.p_total for r in outcome_probabilities(named_state("s", N, b), U)}
        perm = named_distribution("s", U, b)
        assert max(abs(irrep[o] - perm[o]) for o in irrep) < 1e-10


@pytest.mark.parametrize("N", [2, 3])
def test_oracle_agrees_exhaustively(N, rng):
    # every Fock array with N photons on N System modes and up to N Label modes
    U = random_interferometer(N, rng)
    seen = 0
    for A in fock_arrays(N, N, N):
        state = rho_from_fock_array(A)
        irrep = {r.occ: r.p_total for r in outcome_probabilities(state, U)}
        orc = oracle_distribution(A, U)
        assert max(abs(irrep[o] - orc[o]) for o in irrep) < 1e-8
        seen += 1
    assert seen == len(enumerate_occupations(N, N * N))


@pytest.mark.parametrize(
    "A",
    [np.eye(4, dtype=int), singly_array(4, 2), [[1, 1], [1, 0], [0, 1], [0, 0]], [[2, 0], [0, 1], [1, 0], [0, 0]], [[1, 0], [1, 0], [1, 0], [1, 0]]],
)
def test_oracle_spot_checks_n4(A, rng):
    A = np.array(A)
    U = random_interferometer(4, rng)
    irrep = {r.occ: r.p_total for r in outcome_probabilities(rho_from_fock_array(A), U)}
    for occ in [(1, 1, 1, 1), (2, 1, 1, 0), (0, 0, 2, 2), (4, 0, 0, 0)]:
        assert abs(irrep[occ] - outcome_probability_oracle(A, U, occ)) < 1e-8


def test_three_in_two_oracle(rng):
    U = random_interferometer(2, rng)
    for A in ([[2, 0], [0, 1]], [[1, 1], [1, 0]], [[2], [1]]):
        irrep = {r.occ: r.p_total for r in outcome_probabilities(rho_from_fock_array(A), U)}
        orc = oracle_distribution(A, U)
        assert max(abs(irrep[o] - orc[o]) for o in irrep) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_classical_probability_is_completely_distinguishable(N, seed):
    U = random_interferometer(N, np.random.default_rng(seed))
    ones = (1,) * N
    irrep = {r.occ: r.p_total for r in outcome_probabilities(named_state("d", N), U)}
    for occ in enumerate_occupations(N, N):
        assert abs(classical_probability(U, ones, occ) - irrep[occ]) < 1e-10


def test_classical_probability_sums_to_one(rng):
    U = random_interferometer(5, rng)
    total = sum(classical_probability(U, (1, 1, 1, 1, 1), o) for o in enumerate_occupations(5, 5))
    assert abs(total - 1) < 1e-12


def test_indistinguishable_probability_sums_to_one(rng):
    U = random_interferometer(3, rng)
    for inp in [(1, 1, 1), (2, 1, 0), (3, 0, 0)]:
        total = sum(indistinguishable_probability(U, inp, o) for o in enumerate_occupations(3, 3))
        assert abs(total - 1) < 1e-12


def test_engine_evaluates_several_states(rng):
    states = [named_state(k, 3) for k in ("i", "s", "d")]
    engine = IrrepEngine(states)
    U = random_interferometer(3, rng)
    tables = engine.evaluate(U)
    for s, table in zip(states, tables):
        single = outcome_probabilities(s, U)
        assert np.allclose(table.sum(axis=1), [r.p_total for r in single], atol=1e-14)


def test_qft_coincidences():
    # the tritter sends 1/9 of distinguishable light to each of the six M2 outcomes
    rows = {r.occ: r.p_total for r in outcome_probabilities(named_state("d", 3), qft(3))}
    for occ in itertools.permutations((2, 1, 0)):
        assert abs(rows[occ] - 1 / 9) < 1e-12
    rows = {r.occ: r.p_total for r in outcome_probabilities(named_state("i", 3), qft(3))}
    assert abs(rows[(1, 1, 1)] - 1 / 3) < 1e-12


def test_errors():
    with pytest.raises(TransformMismatchError):
        outcome_probabilities(named_state("d", 3), qft(2))
    with pytest.raises(ValueError):
        outcome_probability(named_state("d", 3), qft(3), (1, 1))
    with pytest.raises(ValueError):
        outcome_probability(named_state("d", 3), qft(3), (1, 1, 0))
    with pytest.raises(SizeCapError):
        outcome_probability_oracle(np.eye(9, dtype=int), np.eye(9), (1,) * 9)
    with pytest.raises(ValueError):
        named_distribution("x", qft(3))
    with pytest.raises(TransformMismatchError):
        IrrepEngine([named_state("d", 2), named_state("d", 3)])
