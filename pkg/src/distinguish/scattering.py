"""Photon-counting probabilities ``Tr[rho M_n(U)]``.

Two independent routes:

* the irrep route pushes each block of a :class:`ReducedState` through
  ``U^lam`` (from the Schur-Weyl transform) and reads off the weight-``n``
  diagonal, giving per-irrep contributions;
* the permanent route works in second quantization on System x Label modes
  and never touches the transform. It is the cross-check, and for large N
  the only route (closed forms for the indistinguishable, singly and
  completely distinguishable families).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from .combinatorics import (
    Occupation,
    coincident,
    enumerate_occupations,
    irrep_labels,
    occupation_factorial,
)
from .errors import InternalConsistencyError, SizeCapError, TransformMismatchError
from .optics import as_matrix, occupation_submatrix, permanent
from .schur_weyl import BasisLabel, SchurWeylTransform, get_transform, product_states, tensor_power_block
from .states import ReducedState, check_fock_array

NEGATIVE_TOL = 1e-12
ORACLE_MAX_N = 8


@dataclass(frozen=True)
class OutcomeProbability:
    occ: Occupation
    p_total: float
    per_irrep: dict


def is_bunched(occ) -> bool:
    """All photons in one mode."""
    return sum(1 for x in occ if x) == 1


def enumerate_outcomes(N: int, d: int, exclude_bunched: bool = False) -> list:
    outs = enumerate_occupations(N, d)
    if exclude_bunched:
        return [o for o in outs if not is_bunched(o)]
    return list(outs)


def _clip(x: np.ndarray) -> np.ndarray:
    if x.size and x.min() < -NEGATIVE_TOL:
        raise InternalConsistencyError(f"negative probability {x.min():.3g}")
    return np.maximum(x, 0.0)


# --------------------------------------------------------------------------
# irrep route


class IrrepEngine:
    """Outcome probabilities for a fixed set of states, evaluated for many ``U``.

    The ``p = 1`` Schur-Weyl rows of every irrep are assembled once into a
    sparse matrix; for each ``U`` only the columns of ``U^{⊗N}`` on the
    input weights the states actually occupy are formed.
    """

    def __init__(self, states, T: SchurWeylTransform | None = None):
        self.states = list(states)
        N, d = self.states[0].N, self.states[0].d
        if any((s.N, s.d) != (N, d) for s in self.states):
            raise TransformMismatchError("states have different (N, d)")
        self.N, self.d = N, d
        self.T = get_transform(N, d) if T is None else T
        self.T.check_compatible(N, d)
        self.outcomes = list(enumerate_occupations(N, d))
        out_pos = {occ: i for i, occ in enumerate(self.outcomes)}
        self.irreps = sorted({lam for s in self.states for lam in s.blocks}, reverse=True)

        states_all = product_states(N, d)
        # input labels per irrep: union of supports over all states
        self.support = {}
        for lam in self.irreps:
            labs = set()
            for s in self.states:
                if lam in s.blocks:
                    labs.update(s.support(lam))
            self.support[lam] = [lab for lab in irrep_labels(lam, d) if lab in labs]
        in_occs = sorted({occ for labs in self.support.values() for occ, _ in labs}, reverse=True)
        in_cols = np.concatenate([self.T.blocks[occ].cols for occ in in_occs])
        col_offset, off = {}, 0
        for occ in in_occs:
            col_offset[occ] = off
            off += len(self.T.blocks[occ].cols)
        self.in_states = states_all[in_cols]
        self.all_states = states_all

        w_rows = []
        self.col_slices = {}
        for lam in self.irreps:
            start = len(w_rows)
            for occ, r in self.support[lam]:
                blk = self.T.blocks[occ]
                i = list(blk.rows).index(self.T.label_index[BasisLabel(lam, 1, occ, r)])
                row = np.zeros(len(in_cols), dtype=complex)
                row[col_offset[occ] : col_offset[occ] + len(blk.cols)] = blk.matrix[i]
                w_rows.append(row)
            self.col_slices[lam] = slice(start, len(w_rows))
        self.W = np.array(w_rows)

        data, ri, ci = [], [], []
        self.row_slices = {}
        self.row_outcome = {}
        n_rows = 0
        for lam in self.irreps:
            start = n_rows
            outcome_idx = []
            for occ, r in irrep_labels(lam, d):
                blk = self.T.blocks[occ]
                i = list(blk.rows).index(self.T.label_index[BasisLabel(lam, 1, occ, r)])
                data.append(blk.matrix[i])
                ri.append(np.full(len(blk.cols), n_rows))
                ci.append(blk.cols)
                outcome_idx.append(out_pos[occ])
                n_rows += 1
            self.row_slices[lam] = slice(start, n_rows)
            self.row_outcome[lam] = np.array(outcome_idx)
        self.S = sparse.csr_matrix(
            (np.concatenate(data), (np.concatenate(ri), np.concatenate(ci))), shape=(n_rows, d**N)
        )
        self.state_blocks = []
        for s in self.states:
            sb = {}
            for lam in s.blocks:
                idx = [irrep_labels(lam, d).index(lab) for lab in self.support[lam]]
                sb[lam] = s.weights[lam] * s.blocks[lam][np.ix_(idx, idx)]
            self.state_blocks.append(sb)

    def amplitudes(self, U) -> dict:
        """``U^lam`` restricted to the supported input labels, for each irrep."""
        U = as_matrix(U)
        G = tensor_power_block(U, self.all_states, self.in_states)
        A = self.S @ (G @ self.W.conj().T)
        return {lam: A[self.row_slices[lam], self.col_slices[lam]] for lam in self.irreps}

    def evaluate(self, U) -> list[np.ndarray]:
        """Per state, an ``(outcomes, irreps)`` array of contributions."""
        amps = self.amplitudes(U)
        out = []
        for sb in self.state_blocks:
            table = np.zeros((len(self.outcomes), len(self.irreps)))
            for k, lam in enumerate(self.irreps):
                if lam not in sb:
                    continue
                A = amps[lam]
                vals = np.einsum("ij,jk,ik->i", A, sb[lam], A.conj()).real
                table[:, k] = np.bincount(self.row_outcome[lam], weights=vals, minlength=len(self.outcomes))
            out.append(_clip(table))
        return out


def outcome_probabilities(state: ReducedState, U, T: SchurWeylTransform | None = None) -> list[OutcomeProbability]:
    """Every outcome's probability for ``state`` through ``U``, in canonical order."""
    U = as_matrix(U)
    if U.shape[0] != state.d:
        raise TransformMismatchError(f"{U.shape[0]}-mode interferometer for a {state.d}-mode state")
    engine = IrrepEngine([state], T)
    (table,) = engine.evaluate(U)
    return [
        OutcomeProbability(occ, float(row.sum()), {lam: float(v) for lam, v in zip(engine.irreps, row)})
        for occ, row in zip(engine.outcomes, table)
    ]


def outcome_probability(state: ReducedState, U, occ, T: SchurWeylTransform | None = None) -> OutcomeProbability:
    occ = tuple(int(x) for x in occ)
    if len(occ) != state.d:
        raise ValueError(f"occupation {occ} does not have {state.d} modes")
    if sum(occ) != state.N:
        raise ValueError(f"occupation {occ} does not hold {state.N} photons")
    for item in outcome_probabilities(state, U, T):
        if item.occ == occ:
            return item
    raise AssertionError("outcome missing from enumeration")


# --------------------------------------------------------------------------
# permanent route


def indistinguishable_probability(U, occ_in, occ_out) -> float:
    """``|per(U_in^out)|^2 / (in! out!)``."""
    sub = occupation_submatrix(U, occ_in, occ_out)
    return abs(permanent(sub)) ** 2 / (occupation_factorial(occ_in) * occupation_factorial(occ_out))


def classical_probability(U, occ_in, occ_out) -> float:
    """Fully distinguishable photons: ``per(|U_in^out|^2) / out!``."""
    sub = occupation_submatrix(U, occ_in, occ_out)
    return permanent(np.abs(sub) ** 2).real / occupation_factorial(occ_out)


def _tables(row_sums, col_sums):
    """Non-negative integer matrices with the given margins."""
    row_sums, col_sums = list(row_sums), list(col_sums)
    if not row_sums:
        if not any(col_sums):
            yield []
        return
    first, rest = row_sums[0], row_sums[1:]

    def split(total, caps):
        if len(caps) == 1:
            if total <= caps[0]:
                yield [total]
            return
        for x in range(min(total, caps[0]), -1, -1):
            for tail in split(total - x, caps[1:]):
                yield [x] + tail

    for row in split(first, col_sums):
        remaining = [c - x for c, x in zip(col_sums, row)]
        for tail in _tables(rest, remaining):
            yield [row] + tail


def outcome_probability_oracle(A, U, occ) -> float:
    """System outcome probability for Fock array ``A`` by second quantization.

    The photons evolve under ``U`` on the System and the identity on the
    Label. The Label output is summed over, each output array ``B`` adding
    ``|per|^2 / (A! B!)``.
    """
    A = check_fock_array(A)
    U = as_matrix(U)
    N = int(A.sum())
    if N > ORACLE_MAX_N:
        raise SizeCapError(f"oracle limited to {ORACLE_MAX_N} photons, got {N}")
    dS, dL = A.shape
    occ = tuple(int(x) for x in occ)
    if len(occ) != dS or sum(occ) != N:
        raise ValueError(f"occupation {occ} does not fit the Fock array")
    in_modes = [(i, j) for i in range(dS) for j in range(dL) for _ in range(A[i, j])]
    a_fact = math.prod(math.factorial(x) for x in A.ravel())
    total = 0.0
    for B in _tables(occ, A.sum(axis=0)):
        out_modes = [(i, j) for i in range(dS) for j in range(dL) for _ in range(B[i][j])]
        M = np.array([[U[oi, ii] if oj == ij else 0 for ii, ij in in_modes] for oi, oj in out_modes])
        b_fact = math.prod(math.factorial(x) for row in B for x in row)
        total += abs(permanent(M)) ** 2 / (a_fact * b_fact)
    return float(total)


def oracle_distribution(A, U) -> dict:
    A = check_fock_array(A)
    return {occ: outcome_probability_oracle(A, U, occ) for occ in enumerate_occupations(int(A.sum()), A.shape[0])}


@lru_cache(maxsize=4)
def _outcomes_cached(N: int, d: int):
    return enumerate_occupations(N, d)


def named_distribution(kind: str, U, bad_mode: int | None = None) -> dict:
    """Outcome probabilities for a named coincident-input state, by permanents.

    ``kind`` is ``i``, ``s`` (bad photon in ``bad_mode``, 1-based, default
    last), ``sm`` or ``d``. Works beyond the transform budget.
    """
    U = as_matrix(U)
    d = U.shape[0]
    N = d
    ones = coincident(N)
    outs = _outcomes_cached(N, d)
    if kind == "i":
        return {o: indistinguishable_probability(U, ones, o) for o in outs}
    if kind == "d":
        return {o: classical_probability(U, ones, o) for o in outs}
    if kind == "sm":
        parts = [named_distribution("s", U, b) for b in range(1, N + 1)]
        return {o: sum(p[o] for p in parts) / N for o in outs}
    if kind != "s":
        raise ValueError(f"unknown state '{kind}'")
    b = N - 1 if bad_mode is None else bad_mode - 1
    rest_in = tuple(0 if k == b else 1 for k in range(N))
    rest = {o: indistinguishable_probability(U, rest_in, o) for o in _outcomes_cached(N - 1, d)}
    lone = np.abs(U[:, b]) ** 2
    out = {}
    for o in outs:
        total = 0.0
        for k in range(d):
            if o[k]:
                smaller = o[:k] + (o[k] - 1,) + o[k + 1 :]
                total += rest[smaller] * lone[k]
        out[o] = total
    return out
