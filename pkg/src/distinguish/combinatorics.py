"""Partitions, Young tableaux and irrep dimensions for U(d) and S_N.

Partitions, occupations and tableaux are plain tuples so they hash and
compare cheaply:

* a partition is a weakly decreasing tuple of positive ints, e.g. ``(2, 1)``;
* an occupation (weight) is a tuple of non-negative ints, one per mode;
* a tableau is a tuple of rows, each row a tuple of entries, e.g. ``((1, 2), (3,))``.

Tableau entries are 1-based, as in the usual diagrams. Orderings are fixed:
partitions are listed lexicographically decreasing and tableaux by their
row-reading word, lexicographically increasing. List position defines the
outer (``p``) and inner (``r``) multiplicity labels used elsewhere.
"""

from __future__ import annotations

import math
from functools import lru_cache

Partition = tuple[int, ...]
Occupation = tuple[int, ...]
Tableau = tuple[tuple[int, ...], ...]


def check_partition(lam, d: int | None = None) -> Partition:
    lam = tuple(int(x) for x in lam)
    if not lam or any(x < 1 for x in lam):
        raise ValueError(f"partition rows must be positive: {lam}")
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"partition rows must be weakly decreasing: {lam}")
    if d is not None and len(lam) > d:
        raise ValueError(f"partition {lam} has more than {d} rows")
    return lam


def check_occupation(occ, d: int | None = None, N: int | None = None) -> Occupation:
    occ = tuple(int(x) for x in occ)
    if any(x < 0 for x in occ):
        raise ValueError(f"occupation entries must be non-negative: {occ}")
    if d is not None and len(occ) != d:
        raise ValueError(f"occupation {occ} does not have {d} modes")
    if N is not None and sum(occ) != N:
        raise ValueError(f"occupation {occ} does not hold {N} photons")
    return occ


def coincident(N: int) -> Occupation:
    """The occupation with exactly one photon in each of ``N`` modes."""
    return (1,) * N


def occupation_factorial(occ) -> int:
    """``prod_j occ_j!``, written n! throughout."""
    return math.prod(math.factorial(x) for x in occ)


@lru_cache(maxsize=None)
def enumerate_partitions(N: int, d: int) -> tuple[Partition, ...]:
    """All partitions of ``N`` with at most ``d`` rows, lexicographically decreasing."""
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")

    def rec(n, max_part, rows_left):
        if n == 0:
            yield ()
            return
        if rows_left == 0:
            return
        for first in range(min(n, max_part), 0, -1):
            for rest in rec(n - first, first, rows_left - 1):
                yield (first,) + rest

    return tuple(rec(N, N, d))


@lru_cache(maxsize=None)
def enumerate_occupations(N: int, d: int) -> tuple[Occupation, ...]:
    """All occupations of ``N`` photons in ``d`` modes, lexicographically decreasing."""

    def rec(n, modes):
        if modes == 1:
            yield (n,)
            return
        for first in range(n, -1, -1):
            for rest in rec(n - first, modes - 1):
                yield (first,) + rest

    return tuple(rec(N, d))


def _hooks(lam: Partition):
    cols = [sum(1 for row in lam if row > j) for j in range(lam[0])]
    for i, row in enumerate(lam):
        for j in range(row):
            yield i, j, (row - j - 1) + (cols[j] - i - 1) + 1


@lru_cache(maxsize=None)
def sym_dim(lam: Partition) -> int:
    """Dimension of the S_N irrep ``lam`` by the hook length formula."""
    lam = check_partition(lam)
    N = sum(lam)
    return math.factorial(N) // math.prod(h for _, _, h in _hooks(lam))


@lru_cache(maxsize=None)
def unitary_dim(lam: Partition, d: int) -> int:
    """Dimension of the U(d) irrep ``lam`` by the hook content formula."""
    lam = check_partition(lam)
    if len(lam) > d:
        return 0
    num = math.prod(d + j - i for i, j, _ in _hooks(lam))
    den = math.prod(h for _, _, h in _hooks(lam))
    return num // den


def _conjugate_lengths(lam: Partition) -> list[int]:
    return [sum(1 for row in lam if row > j) for j in range(lam[0])]


@lru_cache(maxsize=None)
def enumerate_ssyt(lam: Partition, occ: Occupation) -> tuple[Tableau, ...]:
    """Semistandard tableaux of shape ``lam`` and weight ``occ``.

    The value ``k`` (1-based) appears ``occ[k-1]`` times. The tableaux are
    built by adding the cells holding each value as a horizontal strip, then
    sorted by row-reading word. The list length is the Kostka number.
    """
    lam = check_partition(lam)
    occ = check_occupation(occ)
    if sum(occ) != sum(lam):
        raise ValueError(f"weight {occ} does not fill shape {lam}")

    # shapes are grown value by value; a cell holding value k lies in a
    # horizontal strip between the shape before and after adding k
    results = []

    def grow(shape, value, rows):
        if value > len(occ):
            if tuple(shape) == lam:
                results.append(tuple(tuple(r) for r in rows))
            return
        count = occ[value - 1]
        # distribute ``count`` cells over rows, at most one per column
        def place(i, remaining, new_shape):
            if i == len(lam):
                if remaining == 0:
                    new_rows = [list(r) for r in rows]
                    for k in range(len(lam)):
                        new_rows[k].extend([value] * (new_shape[k] - shape[k]))
                    grow(new_shape, value + 1, new_rows)
                return
            upper_limit = lam[i] if i == 0 else min(lam[i], shape[i - 1])
            for extra in range(min(remaining, upper_limit - shape[i]), -1, -1):
                place(i + 1, remaining - extra, new_shape[:i] + [shape[i] + extra] + new_shape[i + 1:])

        place(0, count, list(shape))

    grow([0] * len(lam), 1, [[] for _ in lam])
    results.sort(key=reading_word)
    return tuple(results)


def kostka(lam: Partition, occ: Occupation) -> int:
    """Number of semistandard tableaux of shape ``lam`` and weight ``occ``."""
    return len(enumerate_ssyt(tuple(lam), tuple(occ)))


@lru_cache(maxsize=None)
def enumerate_syt(lam: Partition) -> tuple[Tableau, ...]:
    """Standard tableaux of shape ``lam`` sorted by row-reading word."""
    lam = check_partition(lam)
    N = sum(lam)
    return enumerate_ssyt(lam, (1,) * N)


def reading_word(tab: Tableau) -> tuple[int, ...]:
    return tuple(x for row in tab for x in row)


def is_semistandard(tab: Tableau) -> bool:
    for row in tab:
        if any(a > b for a, b in zip(row, row[1:])):
            return False
    for upper, lower in zip(tab, tab[1:]):
        if len(lower) > len(upper):
            return False
        if any(lower[j] <= upper[j] for j in range(len(lower))):
            return False
    return True


def is_standard(tab: Tableau) -> bool:
    entries = sorted(reading_word(tab))
    return entries == list(range(1, len(entries) + 1)) and is_semistandard(tab)


def tableau_weight(tab: Tableau, d: int) -> Occupation:
    counts = [0] * d
    for x in reading_word(tab):
        counts[x - 1] += 1
    return tuple(counts)


def irrep_weights(lam: Partition, d: int) -> tuple[Occupation, ...]:
    """Weights carried by the U(d) irrep ``lam``, in canonical occupation order."""
    N = sum(lam)
    return tuple(w for w in enumerate_occupations(N, d) if kostka(lam, w) > 0)


@lru_cache(maxsize=None)
def irrep_labels(lam: Partition, d: int) -> tuple[tuple[Occupation, int], ...]:
    """``(occupation, r)`` pairs indexing the U(d) irrep ``lam`` (``r`` is 1-based)."""
    lam = check_partition(lam, d)
    return tuple((w, r) for w in irrep_weights(lam, d) for r in range(1, kostka(lam, w) + 1))


def column_lengths(lam: Partition) -> list[int]:
    return _conjugate_lengths(check_partition(lam))
