import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distinguish.combinatorics import (
    check_occupation,
    check_partition,
    coincident,
    enumerate_occupations,
    enumerate_partitions,
    enumerate_ssyt,
    enumerate_syt,
    irrep_labels,
    irrep_weights,
    is_semistandard,
    is_standard,
    kostka,
    occupation_factorial,
    sym_dim,
    tableau_weight,
    unitary_dim,
)


def brute_kostka(lam, occ):
    """Fill the diagram with every multiset arrangement and keep the semistandard ones."""
    cells = [(i, j) for i, row in enumerate(lam) for j in range(row)]
    letters = [m + 1 for m, c in enumerate(occ) for _ in range(c)]
    seen = set()
    for perm in set(itertools.permutations(letters)):
        tab = [[0] * row for row in lam]
        for (i, j), x in zip(cells, perm):
            tab[i][j] = x
        tab = tuple(tuple(r) for r in tab)
        if is_semistandard(tab):
            seen.add(tab)
    return len(seen)


def test_partitions_small():
    assert enumerate_partitions(4, 4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    assert enumerate_partitions(4, 2) == ((4,), (3, 1), (2, 2))
    assert enumerate_partitions(3, 1) == ((3,),)


@pytest.mark.parametrize("N, count", [(1, 1), (2, 2), (3, 3), (4, 5), (5, 7), (6, 11), (7, 15), (8, 22)])
def test_partition_counts(N, count):
    assert len(enumerate_partitions(N, N)) == count


def test_occupations_order_and_count():
    occs = enumerate_occupations(3, 3)
    assert len(occs) == math.comb(5, 2)
    assert occs[0] == (3, 0, 0) and occs[-1] == (0, 0, 3)
    assert list(occs) == sorted(occs, reverse=True)


@pytest.mark.parametrize(
    "lam, occ, expected",
    [
        ((2, 1), (1, 1, 1), 2),
        ((3, 2), (2, 2, 1), 2),
        ((2, 2), (1, 1, 1, 1), 2),
        ((3, 1), (1, 1, 1, 1), 3),
        ((2, 1, 1), (2, 1, 1), 1),
        ((3,), (1, 1, 1), 1),
        ((2, 2), (3, 1), 0),
    ],
)
def test_kostka_examples(lam, occ, expected):
    assert kostka(lam, occ) == expected
    assert brute_kostka(lam, occ) == expected


@pytest.mark.parametrize("N", range(1, 6))
def test_kostka_matches_brute_force(N):
    for lam in enumerate_partitions(N, N):
        for occ in enumerate_occupations(N, min(N, 3)):
            assert kostka(lam, occ) == brute_kostka(lam, occ)


@pytest.mark.parametrize("N", range(1, 8))
def test_hook_length_counts_standard_tableaux(N):
    for lam in enumerate_partitions(N, N):
        syt = enumerate_syt(lam)
        assert len(syt) == sym_dim(lam)
        assert all(is_standard(t) for t in syt)


@pytest.mark.parametrize("N, d", [(2, 2), (3, 2), (3, 3), (4, 3), (4, 4), (5, 3)])
def test_weyl_dimension_counts_semistandard_tableaux(N, d):
    for lam in enumerate_partitions(N, d):
        total = sum(kostka(lam, w) for w in enumerate_occupations(N, d))
        assert total == unitary_dim(lam, d) == len(irrep_labels(lam, d))


@pytest.mark.parametrize("N", range(2, 7))
def test_schur_weyl_dimension_sums(N):
    d = N
    parts = enumerate_partitions(N, d)
    assert sum(unitary_dim(l, d) * sym_dim(l) for l in parts) == d**N
    assert sum(sym_dim(l) ** 2 for l in parts) == math.factorial(N)
    assert sum(unitary_dim(l, d) ** 2 for l in parts) == math.comb(N * N + N - 1, N)


def test_known_dimensions():
    assert unitary_dim((2, 1), 3) == 8
    assert unitary_dim((3,), 3) == 10
    assert unitary_dim((1, 1, 1), 3) == 1
    assert sym_dim((3, 2)) == 5
    assert sym_dim((2, 2, 1)) == 5


def test_ssyt_order_and_weight():
    tabs = enumerate_ssyt((2, 1), (1, 1, 1))
    assert tabs == (((1, 2), (3,)), ((1, 3), (2,)))
    assert all(tableau_weight(t, 3) == (1, 1, 1) for t in tabs)


def test_irrep_weights_and_labels():
    assert irrep_weights((1, 1), 3) == ((1, 1, 0), (1, 0, 1), (0, 1, 1))
    labels = irrep_labels((2, 1), 3)
    assert ((1, 1, 1), 1) in labels and ((1, 1, 1), 2) in labels
    assert ((3, 0, 0), 1) not in labels


def test_small_helpers():
    assert coincident(4) == (1, 1, 1, 1)
    assert occupation_factorial((3, 0, 2)) == 12


@pytest.mark.parametrize("bad", [(), (1, 2), (0, 1), (2, -1)])
def test_check_partition_rejects(bad):
    with pytest.raises(ValueError):
        check_partition(bad)


def test_check_partition_row_limit():
    with pytest.raises(ValueError):
        check_partition((1, 1, 1), d=2)


def test_check_occupation():
    assert check_occupation([1, 0, 2], d=3, N=3) == (1, 0, 2)
    with pytest.raises(ValueError):
        check_occupation((1, -1))
    with pytest.raises(ValueError):
        check_occupation((1, 1), N=3)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 4))
def test_kostka_dominance_and_symmetry(N, d):
    # permuting a weight never changes the Kostka number
    for lam in enumerate_partitions(N, d):
        for occ in enumerate_occupations(N, d):
            k = kostka(lam, occ)
            assert k == kostka(lam, tuple(sorted(occ, reverse=True)))
            if occ == (N,) + (0,) * (d - 1):
                assert k == (1 if lam == (N,) else 0)
