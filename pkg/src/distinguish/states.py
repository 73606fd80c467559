"""Reduced System states in the Schur-Weyl basis.

Tracing the Label out of a totally symmetric System-Label state leaves the
same block on every outer copy of an irrep, with the copies equally mixed.
A :class:`ReducedState` therefore stores, per irrep ``lam``:

* ``weights[lam]``, the total probability carried by ``lam``;
* ``blocks[lam]``, a trace-one matrix on the U(d) irrep, rows and columns
  indexed by ``irrep_labels(lam, d)``.

The full System density operator is ``weights[lam] / sym_dim(lam)`` times
``blocks[lam]`` on each of the ``sym_dim(lam)`` copies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import (
    Partition,
    coincident,
    enumerate_partitions,
    irrep_labels,
    kostka,
    occupation_factorial,
    sym_dim,
    unitary_dim,
)
from .errors import BudgetExceededError, InternalConsistencyError, TransformMismatchError
from .optics import irrep_block, permutation_matrix
from .schur_weyl import BasisLabel, SchurWeylTransform, get_transform

STATE_TOL = 1e-12
PAIRING_TOL = 1e-9
FOCK_BUDGET = 500_000


@dataclass(frozen=True, eq=False)
class ReducedState:
    N: int
    d: int
    weights: dict
    blocks: dict
    name: str = "custom"

    def __post_init__(self):
        weights, blocks = {}, {}
        for lam, w in self.weights.items():
            lam = tuple(lam)
            if w < -STATE_TOL:
                raise ValueError(f"negative weight {w} on {lam}")
            if w <= STATE_TOL:
                continue
            size = unitary_dim(lam, self.d)
            B = np.array(self.blocks[lam], dtype=complex)
            if B.shape != (size, size):
                raise ValueError(f"block for {lam} has shape {B.shape}, expected {(size, size)}")
            weights[lam] = float(w)
            blocks[lam] = B
        total = sum(weights.values())
        if abs(total - 1) > 1e-10:
            raise ValueError(f"irrep weights sum to {total}, not 1")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "blocks", blocks)

    def labels(self, lam) -> tuple:
        return irrep_labels(tuple(lam), self.d)

    def support(self, lam, tol: float = 1e-14) -> list:
        """Labels ``(occ, r)`` of ``lam`` on which the block has weight."""
        diag = np.abs(np.diag(self.blocks[lam]))
        return [lab for lab, x in zip(self.labels(lam), diag) if x > tol]

    def input_weights(self) -> set:
        return {occ for lam in self.blocks for occ, _ in self.support(lam)}

    def validate(self, tol: float = STATE_TOL) -> None:
        for lam, B in self.blocks.items():
            if np.abs(B - B.conj().T).max() > tol:
                raise InternalConsistencyError(f"block {lam} is not Hermitian")
            if abs(np.trace(B).real - 1) > 1e-10:
                raise InternalConsistencyError(f"block {lam} does not have unit trace")
            if np.linalg.eigvalsh(B).min() < -1e-10:
                raise InternalConsistencyError(f"block {lam} is not positive semidefinite")

    def purity(self) -> float:
        return float(sum(self.weights[lam] ** 2 / sym_dim(lam) * np.trace(B @ B).real for lam, B in self.blocks.items()))

    def symmetric_weight(self) -> float:
        return self.weights.get((self.N,), 0.0)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of the full System state, copies included."""
        vals = []
        for lam, B in self.blocks.items():
            ev = np.linalg.eigvalsh(B) * self.weights[lam] / sym_dim(lam)
            vals.extend(list(ev) * sym_dim(lam))
        return np.sort(np.array(vals))[::-1]

    def dense(self, T: SchurWeylTransform) -> np.ndarray:
        """Full density matrix in the order of ``T.labels`` (small cases only)."""
        T.check_compatible(self.N, self.d)
        out = np.zeros((len(T.labels), len(T.labels)), dtype=complex)
        for lam, B in self.blocks.items():
            f = sym_dim(lam)
            for p in range(1, f + 1):
                idx = [T.label_index[BasisLabel(lam, p, occ, r)] for occ, r in self.labels(lam)]
                out[np.ix_(idx, idx)] = self.weights[lam] / f * B
        return out

    def to_json(self) -> dict:
        out = {"N": self.N, "d": self.d, "name": self.name, "irreps": {}}
        for lam, B in self.blocks.items():
            out["irreps"][",".join(map(str, lam))] = {
                "weight": self.weights[lam],
                "labels": [[list(occ), r] for occ, r in self.labels(lam)],
                "block": [[[float(z.real), float(z.imag)] for z in row] for row in B],
            }
        return out


def mix(states, probabilities=None, name: str = "mixture") -> ReducedState:
    """Convex combination of reduced states."""
    states = list(states)
    if probabilities is None:
        probabilities = [1 / len(states)] * len(states)
    N, d = states[0].N, states[0].d
    if any((s.N, s.d) != (N, d) for s in states):
        raise ValueError("cannot mix states of different (N, d)")
    weights: dict = {}
    blocks: dict = {}
    for q, s in zip(probabilities, states):
        for lam, w in s.weights.items():
            weights[lam] = weights.get(lam, 0.0) + q * w
            blocks[lam] = blocks.get(lam, 0) + q * w * s.blocks[lam]
    blocks = {lam: B / weights[lam] for lam, B in blocks.items()}
    return ReducedState(N, d, weights, blocks, name=name)


def _projector(lam, d, labels) -> np.ndarray:
    all_labels = irrep_labels(lam, d)
    P = np.zeros((len(all_labels),) * 2)
    for i, lab in enumerate(all_labels):
        if lab in labels:
            P[i, i] = 1
    return P / np.trace(P)


def coincident_state(N: int, weights: dict, name: str = "custom") -> ReducedState:
    """State with the given irrep weights, each block uniform over the coincident weight space."""
    d = N
    ones = coincident(N)
    blocks = {}
    for lam in weights:
        lam = tuple(lam)
        labels = {(ones, r) for r in range(1, kostka(lam, ones) + 1)}
        blocks[lam] = _projector(lam, d, labels)
    return ReducedState(N, d, {tuple(k): v for k, v in weights.items()}, blocks, name=name)


def rho_indistinguishable(N: int) -> ReducedState:
    """All photons share one Label mode: the symmetric coincident state."""
    if N < 1:
        raise ValueError("need N >= 1")
    return coincident_state(N, {(N,): 1.0}, name="indistinguishable")


def rho_completely(N: int) -> ReducedState:
    """Every photon in its own Label mode."""
    if N < 1:
        raise ValueError("need N >= 1")
    ones = coincident(N)
    fact = math.factorial(N)
    weights = {lam: sym_dim(lam) * kostka(lam, ones) / fact for lam in enumerate_partitions(N, N)}
    return coincident_state(N, weights, name="completely")


def rho_singly(N: int, bad_mode: int | None = None, T: SchurWeylTransform | None = None) -> ReducedState:
    """One photon, entering System mode ``bad_mode`` (1-based, default N), carries its own Label."""
    if N < 2:
        raise ValueError("need N >= 2")
    bad_mode = N if bad_mode is None else int(bad_mode)
    if not 1 <= bad_mode <= N:
        raise ValueError(f"bad_mode must lie in 1..{N}")
    ones = coincident(N)
    lam = (N - 1, 1)
    labels = irrep_labels(lam, N)
    vec = np.zeros(len(labels), dtype=complex)
    vec[labels.index((ones, 1))] = 1
    if bad_mode != N:
        T = get_transform(N, N) if T is None else T
        T.check_compatible(N, N)
        perm = list(range(N))
        perm[bad_mode - 1], perm[N - 1] = N - 1, bad_mode - 1
        block = irrep_block(permutation_matrix(perm), lam, T).matrix
        vec = block @ vec
    sym = _projector((N,), N, {(ones, 1)})
    weights = {(N,): 1 / N, lam: (N - 1) / N}
    blocks = {(N,): sym, lam: np.outer(vec, vec.conj())}
    return ReducedState(N, N, weights, blocks, name=f"singly[{bad_mode}]")


def rho_singly_mixed(N: int, T: SchurWeylTransform | None = None) -> ReducedState:
    """Uniform mixture of the singly distinguishable states over the bad mode."""
    return mix([rho_singly(N, b, T) for b in range(1, N + 1)], name="singly-mixed")


def symmetric_weight(label_occ) -> Fraction:
    """Weight of the symmetric irrep for coincident System rows with the given Label occupation."""
    N = sum(label_occ)
    return Fraction(occupation_factorial(label_occ), math.factorial(N))


# --------------------------------------------------------------------------
# arbitrary Fock arrays


def check_fock_array(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.size == 0:
        raise ValueError("Fock array must be a non-empty matrix")
    if not np.issubdtype(A.dtype, np.integer):
        if not np.allclose(A, np.round(A)):
            raise ValueError("Fock array entries must be integers")
        A = np.round(A).astype(int)
    if (A < 0).any():
        raise ValueError("Fock array entries must be non-negative")
    if A.sum() < 1:
        raise ValueError("Fock array holds no photons")
    return A.astype(int)


def _symmetrized(A: np.ndarray, dL: int) -> np.ndarray:
    """``d_S^N x d_L^N`` amplitude matrix of the symmetrized first-quantized state."""
    dS = A.shape[0]
    sys_modes, lab_modes = [], []
    for i, j in zip(*np.nonzero(A)):
        sys_modes += [i] * A[i, j]
        lab_modes += [j] * A[i, j]
    N = len(sys_modes)
    sys_modes, lab_modes = np.array(sys_modes), np.array(lab_modes)
    perms = np.array(list(itertools.permutations(range(N))))
    xs = sys_modes[perms] @ (dS ** np.arange(N - 1, -1, -1))
    ys = lab_modes[perms] @ (dL ** np.arange(N - 1, -1, -1))
    psi = np.zeros((dS**N, dL**N))
    np.add.at(psi, (xs, ys), 1.0)
    return psi / np.linalg.norm(psi)


def rho_from_fock_array(A, T: SchurWeylTransform | None = None, name: str = "fock") -> ReducedState:
    """Reduced System state of the symmetrized Fock array ``A`` (System rows, Label columns).

    The symmetrized state is rotated into the System Schur-Weyl basis and the
    Label traced out. Along the way the copy structure is checked: copies of
    one irrep must carry equal blocks and no coherence between copies or
    irreps may survive.
    """
    A = check_fock_array(A)
    dS, dL = A.shape
    N = int(A.sum())
    dL = max(dL, 2)
    if dS**N * dL**N > FOCK_BUDGET:
        raise BudgetExceededError(f"Fock array needs a {dS**N} x {dL**N} amplitude matrix")
    T = get_transform(N, dS) if T is None else T
    if (T.N, T.d) != (N, dS):
        raise TransformMismatchError(f"transform {(T.N, T.d)} does not match Fock array {(N, dS)}")

    psi = _symmetrized(A, dL)
    rotated = np.zeros((len(T.labels), psi.shape[1]), dtype=complex)
    for blk in T.blocks.values():
        rotated[blk.rows] = blk.matrix @ psi[blk.cols]

    rows = {}
    for lam in enumerate_partitions(N, dS):
        for p in range(1, sym_dim(lam) + 1):
            rows[lam, p] = [T.label_index[BasisLabel(lam, p, occ, r)] for occ, r in irrep_labels(lam, dS)]
    weights, blocks = {}, {}
    residual = 0.0
    keys = list(rows)
    for a, (lam, p) in enumerate(keys):
        Xa = rotated[rows[lam, p]]
        for lam2, p2 in keys[a:]:
            Xb = rotated[rows[lam2, p2]]
            G = Xa @ Xb.conj().T
            if (lam, p) == (lam2, p2):
                if p == 1:
                    blocks[lam] = G
                else:
                    residual = max(residual, float(np.abs(G - blocks[lam]).max()))
            else:
                residual = max(residual, float(np.abs(G).max()) if G.size else 0.0)
    if residual > PAIRING_TOL:
        raise InternalConsistencyError(f"reduced state breaks the copy structure by {residual:.3g}")
    for lam, B in blocks.items():
        tr = float(np.trace(B).real)
        weights[lam] = tr * sym_dim(lam)
        if tr > 0:
            blocks[lam] = B / tr
    return ReducedState(N, dS, weights, blocks, name=name)


def from_json(data: dict) -> ReducedState:
    weights, blocks = {}, {}
    for key, item in data["irreps"].items():
        lam = tuple(int(x) for x in key.split(","))
        weights[lam] = item["weight"]
        blocks[lam] = np.array([[complex(*z) for z in row] for row in item["block"]])
    return ReducedState(data["N"], data["d"], weights, blocks, name=data.get("name", "custom"))


def named_state(kind: str, N: int, bad_mode: int | None = None) -> ReducedState:
    """State by short name: ``i``, ``s``, ``d`` or ``sm``."""
    if kind == "i":
        return rho_indistinguishable(N)
    if kind == "s":
        return rho_singly(N, bad_mode)
    if kind == "d":
        return rho_completely(N)
    if kind == "sm":
        return rho_singly_mixed(N)
    raise ValueError(f"unknown state '{kind}'")


def partition_weights(state: ReducedState) -> dict[Partition, float]:
    return dict(state.weights)
