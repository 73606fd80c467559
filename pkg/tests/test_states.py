import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distinguish.combinatorics import sym_dim
from distinguish.errors import BudgetExceededError, InternalConsistencyError
from distinguish.optics import irrep_block, permutation_matrix
from distinguish.schur_weyl import get_transform
from distinguish.states import (
    ReducedState,
    _symmetrized,
    check_fock_array,
    coincident_state,
    from_json,
    mix,
    named_state,
    rho_completely,
    rho_from_fock_array,
    rho_indistinguishable,
    rho_singly,
    rho_singly_mixed,
    symmetric_weight,
)


def singly_array(N, bad_mode):
    A = np.zeros((N, 2), dtype=int)
    A[:, 0] = 1
    A[bad_mode - 1] = [0, 1]
    return A


def distance(a, b):
    assert set(a.weights) == set(b.weights)
    w = max(abs(a.weights[l] - b.weights[l]) for l in a.weights)
    return max(w, max(np.abs(a.blocks[l] - b.blocks[l]).max() for l in a.blocks))


def product_basis_state(A, T):
    """Reduced state by a plain partial trace in the product basis, rotated afterwards."""
    psi = _symmetrized(np.asarray(A), max(np.asarray(A).shape[1], 2))
    rho = psi @ psi.conj().T
    M = T.matrix
    return M @ rho @ M.conj().T


@pytest.mark.parametrize("N", [2, 3, 4])
def test_fock_arrays_reproduce_named_states(N):
    assert distance(rho_from_fock_array(np.eye(N, dtype=int)), rho_completely(N)) < 1e-12
    A = np.zeros((N, 1), dtype=int) + 1
    assert distance(rho_from_fock_array(A), rho_indistinguishable(N)) < 1e-12
    for b in range(1, N + 1):
        assert distance(rho_from_fock_array(singly_array(N, b)), rho_singly(N, b)) < 1e-12


def test_singly_n5_all_bad_modes():
    for b in range(1, 6):
        assert distance(rho_from_fock_array(singly_array(5, b)), rho_singly(5, b)) < 1e-12


@pytest.mark.parametrize("A", [[[1, 0], [0, 1], [1, 0]], [[2, 0], [0, 1]], [[1, 1], [1, 0]], [[1, 1, 0], [0, 1, 0], [1, 0, 1]]])
def test_fock_state_matches_product_basis_trace(A):
    A = np.array(A)
    state = rho_from_fock_array(A)
    T = get_transform(int(A.sum()), A.shape[0])
    assert np.abs(state.dense(T) - product_basis_state(A, T)).max() < 1e-12


def test_three_in_two_states():
    s1 = rho_from_fock_array([[2, 0], [0, 1]])
    s2 = rho_from_fock_array([[1, 1], [1, 0]])
    assert abs(s1.weights[(3,)] - 1 / 3) < 1e-12 and abs(s1.weights[(2, 1)] - 2 / 3) < 1e-12
    assert abs(s2.weights[(3,)] - 2 / 3) < 1e-12 and abs(s2.weights[(2, 1)] - 1 / 3) < 1e-12
    # both spread evenly over the two (2,1) states of weight (2,1)
    for s in (s1, s2):
        B = s.blocks[(2, 1)]
        assert np.allclose(np.diag(B).real, [1, 0])
    # every full-state eigenvalue is 1/3 (s1) and 4/6, 1/6, 1/6 (s2)
    nonzero = lambda s: s.eigenvalues()[s.eigenvalues() > 1e-12]
    assert np.allclose(nonzero(s1), [1 / 3] * 3)
    assert np.allclose(nonzero(s2), [2 / 3, 1 / 6, 1 / 6])


def test_extra_label_mode_gives_same_state():
    a = rho_from_fock_array([[2, 0], [0, 1]])
    b = rho_from_fock_array([[1, 1, 0], [0, 0, 1]])
    assert distance(a, b) < 1e-12


@pytest.mark.parametrize("kind, N", [(k, N) for k in ("i", "s", "d", "sm") for N in (2, 3, 4, 5)])
def test_named_states_are_valid(kind, N):
    s = named_state(kind, N)
    s.validate()
    assert abs(sum(s.weights.values()) - 1) < 1e-12
    assert s.eigenvalues().min() > -1e-12
    assert abs(s.eigenvalues().sum() - 1) < 1e-12


@pytest.mark.parametrize("kind", ["i", "s", "d", "sm"])
def test_purity_matches_dense(kind):
    T = get_transform(3, 3)
    s = named_state(kind, 3)
    rho = s.dense(T)
    assert abs(s.purity() - np.trace(rho @ rho).real) < 1e-12


def test_purities():
    assert abs(rho_indistinguishable(4).purity() - 1) < 1e-12
    assert abs(rho_singly(4).purity() - 1 / 4) < 1e-12
    # the completely distinguishable state is maximally mixed over the coincident weight space
    assert abs(rho_completely(4).purity() - 1 / math.factorial(4)) < 1e-12


def test_completely_weights():
    s = rho_completely(3)
    assert s.weights == pytest.approx({(3,): 1 / 6, (2, 1): 4 / 6, (1, 1, 1): 1 / 6})


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4).filter(lambda x: 2 <= sum(x) <= 4))
@settings(max_examples=25, deadline=None)
def test_symmetric_weight_formula(label_occ):
    N = sum(label_occ)
    # coincident System rows, Label column j carrying label_occ[j] photons
    A = np.zeros((N, len(label_occ)), dtype=int)
    row = 0
    for j, n in enumerate(label_occ):
        for _ in range(n):
            A[row, j] = 1
            row += 1
    s = rho_from_fock_array(A)
    expected = Fraction(math.prod(math.factorial(n) for n in label_occ), math.factorial(N))
    assert symmetric_weight(label_occ) == expected
    assert abs(s.symmetric_weight() - float(expected)) < 1e-12


@pytest.mark.parametrize("N", [3, 4])
def test_singly_permutation_covariance(N):
    T = get_transform(N, N)
    lam = (N - 1, 1)
    base = rho_singly(N, N)
    for b in range(1, N):
        perm = list(range(N))
        perm[b - 1], perm[N - 1] = N - 1, b - 1
        P = irrep_block(permutation_matrix(perm), lam, T).matrix
        moved = P @ base.blocks[lam] @ P.conj().T
        assert np.abs(moved - rho_singly(N, b).blocks[lam]).max() < 1e-12


def test_singly_mixed_is_average():
    m = rho_singly_mixed(3)
    avg = sum(rho_singly(3, b).blocks[(2, 1)] for b in (1, 2, 3)) / 3
    assert np.abs(m.blocks[(2, 1)] - avg).max() < 1e-12
    assert m.weights[(2, 1)] == pytest.approx(2 / 3)


def test_mix_rejects_mismatch():
    with pytest.raises(ValueError):
        mix([rho_completely(2), rho_completely(3)])


def test_json_roundtrip():
    s = rho_singly(3, 2)
    t = from_json(s.to_json())
    assert distance(s, t) < 1e-15
    assert t.name == s.name


def test_state_validation():
    with pytest.raises(ValueError):
        ReducedState(2, 2, {(2,): 0.5}, {(2,): np.eye(3) / 3})
    with pytest.raises(ValueError):
        ReducedState(2, 2, {(2,): 1.0}, {(2,): np.eye(2)})
    with pytest.raises(ValueError):
        ReducedState(2, 2, {(2,): 1.2, (1, 1): -0.2}, {(2,): np.eye(3) / 3, (1, 1): np.eye(1)})
    bad = ReducedState(2, 2, {(2,): 1.0}, {(2,): np.diag([2.0, -1.0, 0.0])})
    with pytest.raises(InternalConsistencyError):
        bad.validate()


def test_coincident_state_custom_weights():
    s = coincident_state(2, {(2,): 0.3, (1, 1): 0.7})
    assert s.weights == pytest.approx({(2,): 0.3, (1, 1): 0.7})
    assert s.support((2,)) == [((1, 1), 1)]


def test_argument_checks():
    with pytest.raises(ValueError):
        rho_singly(3, 4)
    with pytest.raises(ValueError):
        rho_singly(1)
    with pytest.raises(ValueError):
        named_state("x", 3)
    with pytest.raises(ValueError):
        check_fock_array([[1, -1]])
    with pytest.raises(ValueError):
        check_fock_array([[0, 0]])
    with pytest.raises(ValueError):
        check_fock_array([[0.5]])
    with pytest.raises(BudgetExceededError):
        rho_from_fock_array(np.eye(6, dtype=int))


def test_sym_dim_copies_in_dense():
    T = get_transform(3, 3)
    rho = rho_completely(3).dense(T)
    assert np.count_nonzero(np.abs(np.diag(rho)) > 1e-14) == 6
    assert all(sym_dim(l) >= 1 for l in rho_completely(3).weights)
