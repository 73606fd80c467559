"""Linear-optical networks and the matrix functions evaluated on them.

Beamsplitter convention: a two-mode element on modes ``(j, j+1)`` is
``B(theta) @ diag(exp(i*omega), 1)``, with ``B(theta) = [[c, s], [-s, c]]``,
so the phase acts on mode ``j`` before the block mixes the pair.

The triangular mesh used by :func:`from_reck` is listed in the order light
meets it. Layer 0 is a chain of ``d-1`` elements on pairs ``(0,1), (1,2), ...,
(d-2,d-1)``; layer ``k`` has ``d-1-k`` elements on pairs ``(0,1), ...,
(d-2-k, d-1-k)``. Phases on the first layer can always be pushed out to the
input, so only the later layers carry a phase. Phases before and after the
whole mesh are never represented.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .combinatorics import irrep_labels, occupation_factorial
from .errors import SizeCapError, TransformMismatchError
from .schur_weyl import SchurWeylTransform, haar_unitary, product_states, tensor_power_block

UNITARY_TOL = 1e-12
PERMANENT_MAX_SIZE = 20


@dataclass(frozen=True, eq=False)
class ReckParams:
    """Mesh parameters: one angle per element, one phase per element after layer 0."""

    thetas: tuple[float, ...]
    omegas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(x) for x in self.thetas))
        object.__setattr__(self, "omegas", tuple(float(x) for x in self.omegas))

    @staticmethod
    def counts(d: int) -> tuple[int, int]:
        return d * (d - 1) // 2, (d - 1) * (d - 2) // 2

    @property
    def d(self) -> int:
        # d(d-1)/2 thetas
        return int(round((1 + math.sqrt(1 + 8 * len(self.thetas))) / 2))

    def as_vector(self) -> np.ndarray:
        return np.array(self.thetas + self.omegas)

    @classmethod
    def from_vector(cls, x, d: int) -> "ReckParams":
        n_t, n_o = cls.counts(d)
        x = np.asarray(x, dtype=float)
        if x.shape != (n_t + n_o,):
            raise ValueError(f"expected {n_t + n_o} parameters for d = {d}, got {x.shape}")
        return cls(tuple(x[:n_t]), tuple(x[n_t:]))

    def to_json(self) -> dict:
        return {"thetas": list(self.thetas), "omegas": list(self.omegas)}


@dataclass(frozen=True, eq=False)
class Interferometer:
    d: int
    matrix: np.ndarray
    reck: ReckParams | None = None
    network: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.d, self.d):
            raise ValueError(f"matrix shape {m.shape} does not match d = {self.d}")
        dev = np.abs(m @ m.conj().T - np.eye(self.d)).max()
        if dev > UNITARY_TOL * 10 * self.d:
            raise ValueError(f"matrix is not unitary (deviation {dev:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "Interferometer") -> "Interferometer":
        return Interferometer(self.d, self.matrix @ other.matrix)

    def to_json(self) -> dict:
        out = {"d": self.d, "entries": [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]}
        if self.reck is not None:
            out["reck"] = self.reck.to_json()
        if self.network is not None:
            out["network"] = [{"offset": off, "block": blk} for off, blk in self.network]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Interferometer":
        d = int(data["d"])
        entries = np.array(data["entries"], dtype=float)
        matrix = (entries[:, 0] + 1j * entries[:, 1]).reshape(d, d)
        reck = None
        if "reck" in data:
            reck = ReckParams(data["reck"]["thetas"], data["reck"]["omegas"])
        return cls(d, matrix, reck=reck)


def as_matrix(U) -> np.ndarray:
    return np.asarray(getattr(U, "matrix", U), dtype=complex)


def save_interferometer(U: Interferometer, path) -> None:
    Path(path).write_text(json.dumps(U.to_json(), indent=1))


def load_interferometer(path) -> Interferometer:
    return Interferometer.from_json(json.loads(Path(path).read_text()))


# --------------------------------------------------------------------------
# mesh parametrisation


def mesh_layout(d: int) -> list[tuple[int, int, bool]]:
    """``(layer, top mode, has_phase)`` for each element in the order light meets it."""
    out = []
    for layer in range(d - 1):
        for j in range(d - 1 - layer):
            out.append((layer, j, layer > 0))
    return out


def beamsplitter(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def from_reck(params: ReckParams, d: int | None = None) -> Interferometer:
    """Interferometer realised by the triangular mesh with the given parameters."""
    d = params.d if d is None else d
    n_t, n_o = ReckParams.counts(d)
    if len(params.thetas) != n_t or len(params.omegas) != n_o:
        raise ValueError(
            f"d = {d} needs {n_t} angles and {n_o} phases, got {len(params.thetas)} and {len(params.omegas)}"
        )
    M = np.eye(d, dtype=complex)
    omegas = iter(params.omegas)
    for (_, j, has_phase), theta in zip(mesh_layout(d), params.thetas):
        block = beamsplitter(theta).astype(complex)
        if has_phase:
            block[:, 0] *= np.exp(1j * next(omegas))
        M[j : j + 2, :] = block @ M[j : j + 2, :]
    return Interferometer(d, M, reck=params)


def _split_two_mode(W: np.ndarray):
    """Write a 2x2 unitary as ``diag(x) @ B(theta) @ diag(y)`` with ``y[0] = 1``."""
    c = min(abs(W[0, 0]), 1.0)
    theta = math.acos(c)
    tiny = 1e-14

    def phase(z):
        return z / abs(z) if abs(z) > tiny else 1.0

    x0 = phase(W[0, 0]) if c > tiny else phase(W[0, 1])
    y1 = phase(W[0, 1]) / x0 if math.sin(theta) > tiny else 1.0
    x1 = phase(W[1, 1]) / y1 if c > tiny else phase(-W[1, 0])
    return theta, np.array([x0, x1]), np.array([1.0, y1])


def to_reck(U) -> tuple[ReckParams, np.ndarray, np.ndarray]:
    """Mesh parameters for ``U`` plus the stripped outer phases.

    Returns ``(params, out_phases, in_phases)`` with
    ``U = diag(out_phases) @ from_reck(params).matrix @ diag(in_phases)``.
    """
    U = as_matrix(U)
    d = U.shape[0]
    layout = mesh_layout(d)
    # null the strict lower rows from the bottom by mixing neighbouring
    # columns; the k-th right-multiplication becomes the k-th element met
    V = U.copy()
    twos = []
    for (layer, j, _) in layout:
        row = d - 1 - layer
        u, w = V[row, j], V[row, j + 1]
        nrm = math.hypot(abs(u), abs(w))
        if nrm < 1e-300:
            R = np.eye(2, dtype=complex)
        else:
            R = np.array([[w, np.conj(u)], [-u, np.conj(w)]]) / nrm
        V[:, j : j + 2] = V[:, j : j + 2] @ R
        twos.append(R.conj().T)
    out_diag = np.diag(V).copy()

    # push phases towards the output; the first element meeting a fresh mode
    # hands its relative phase to the input instead
    delta = np.ones(d, dtype=complex)
    d_in = np.ones(d, dtype=complex)
    touched = [False] * d
    thetas, omegas = [], []
    for (_, j, has_phase), W in zip(layout, twos):
        theta, x, y = _split_two_mode(W)
        a, b = y * delta[j : j + 2]
        if not has_phase:
            if not touched[j]:
                d_in[j] *= a / b
                common = b
            elif not touched[j + 1]:
                d_in[j + 1] *= b / a
                common = a
            else:
                raise AssertionError("chain element meets two used modes")
        else:
            omegas.append(float(np.angle(a / b)) % (2 * math.pi))
            common = b
        thetas.append(theta)
        delta[j : j + 2] = common * x
        touched[j] = touched[j + 1] = True
    params = ReckParams(tuple(thetas), tuple(omegas))
    return params, out_diag * delta, d_in


# --------------------------------------------------------------------------
# standard networks


def qft(N: int) -> Interferometer:
    """Discrete Fourier transform on ``N`` modes, entries ``omega^(jk) / sqrt(N)``."""
    if N < 2:
        raise ValueError("need N >= 2")
    j = np.arange(N)
    return Interferometer(N, np.exp(2j * np.pi * np.outer(j, j) / N) / np.sqrt(N))


def identity(d: int) -> Interferometer:
    return Interferometer(d, np.eye(d))


def random_interferometer(d: int, rng=None) -> Interferometer:
    rng = np.random.default_rng(rng)
    return Interferometer(d, haar_unitary(d, rng))


def embed(block, offset: int, d: int) -> np.ndarray:
    block = as_matrix(block)
    k = block.shape[0]
    if offset < 0 or offset + k > d:
        raise ValueError(f"block of size {k} at offset {offset} does not fit in {d} modes")
    out = np.eye(d, dtype=complex)
    out[offset : offset + k, offset : offset + k] = block
    return out


def layered_network(blocks, d: int | None = None) -> Interferometer:
    """Compose ``(offset, block)`` pairs, the first pair being met first by the light."""
    blocks = list(blocks)
    if d is None:
        d = max(off + as_matrix(b).shape[0] for off, b in blocks)
    M = np.eye(d, dtype=complex)
    for offset, blk in blocks:
        M = embed(blk, offset, d) @ M
    provenance = tuple((off, f"qft{as_matrix(b).shape[0]}") for off, b in blocks)
    return Interferometer(d, M, network=provenance)


# QFT_3 blocks first, then QFT_2 blocks; offsets are the first mode of each block
_CONSTANT_DEPTH = {
    2: ((), (0,)),
    3: ((0,), ()),
    4: ((1,), (0,)),
    5: ((1,), (0, 3)),
    6: ((0, 3), (2,)),
    7: ((1, 4), (0, 3)),
    8: ((1, 4), (0, 3, 6)),
}


def constant_depth_network(N: int) -> Interferometer:
    """Depth-two network of QFT_3 blocks followed by QFT_2 blocks, for 2 <= N <= 8.

    These are the small networks whose success probabilities are tabulated in
    ``data/reference_values.json``.
    """
    if N not in _CONSTANT_DEPTH:
        raise ValueError(f"no constant-depth network recorded for N = {N}")
    threes, twos = _CONSTANT_DEPTH[N]
    blocks = [(o, qft(3)) for o in threes] + [(o, qft(2)) for o in twos]
    return layered_network(blocks, N)


def permutation_matrix(perm) -> Interferometer:
    """Interferometer sending mode ``k`` to mode ``perm[k]``."""
    d = len(perm)
    M = np.zeros((d, d))
    for k, target in enumerate(perm):
        M[target, k] = 1
    return Interferometer(d, M)


# --------------------------------------------------------------------------
# matrix functions


def occupation_submatrix(U, occ_in, occ_out) -> np.ndarray:
    """Row ``j`` of ``U`` repeated ``occ_out[j]`` times, column ``k`` repeated ``occ_in[k]`` times."""
    U = as_matrix(U)
    if sum(occ_in) != sum(occ_out):
        raise ValueError("input and output occupations hold different photon numbers")
    rows = np.repeat(np.arange(len(occ_out)), occ_out)
    cols = np.repeat(np.arange(len(occ_in)), occ_in)
    return U[np.ix_(rows, cols)]


def permanent(M) -> complex:
    """Permanent by Ryser's formula visited in Gray-code order, O(2^n n)."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("permanent needs a square matrix")
    if n > PERMANENT_MAX_SIZE:
        raise SizeCapError(f"permanent of size {n} exceeds the cap of {PERMANENT_MAX_SIZE}")
    if n == 0:
        return 1.0 + 0j
    if n == 1:
        return complex(M[0, 0])
    if n == 2:
        return complex(M[0, 0] * M[1, 1] + M[0, 1] * M[1, 0])

    total = 1 << n
    chunk = min(total, 1 << 14)
    acc = 0j
    for start in range(1, total, chunk):
        ks = np.arange(start, min(start + chunk, total))
        gray = ks ^ (ks >> 1)
        bit = _lowest_bit(ks)
        added = (gray >> bit) & 1
        steps = M[:, bit] * np.where(added, 1.0, -1.0)
        # row sums for the first subset of the chunk, then running updates
        prev = (start - 1) ^ ((start - 1) >> 1)
        cols = [c for c in range(n) if (prev >> c) & 1]
        base = M[:, cols].sum(axis=1) if cols else np.zeros(n, dtype=complex)
        sums = base[:, None] + np.cumsum(steps, axis=1)
        sizes = _popcount(gray)
        signs = np.where((n - sizes) % 2 == 0, 1.0, -1.0)
        acc += np.sum(signs * np.prod(sums, axis=0))
    return complex(acc)


def _lowest_bit(ks: np.ndarray) -> np.ndarray:
    low = ks & -ks
    return np.log2(low).astype(np.int64)


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return count


def permanent_naive(M) -> complex:
    """Permanent straight from the definition; for tests on small matrices."""
    import itertools

    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    return complex(sum(np.prod(M[np.arange(n), list(p)]) for p in itertools.permutations(range(n))))


def scattering_amplitude(U, occ_in, occ_out) -> complex:
    """``per(U_in^out) / sqrt(in! out!)``, the Fock-state transition amplitude."""
    sub = occupation_submatrix(U, occ_in, occ_out)
    return permanent(sub) / math.sqrt(occupation_factorial(occ_in) * occupation_factorial(occ_out))


@dataclass(frozen=True, eq=False)
class IrrepBlock:
    lam: tuple
    matrix: np.ndarray
    labels: tuple


def irrep_block(U, lam, T: SchurWeylTransform, columns=None) -> IrrepBlock:
    """Block of ``T U^{⊗N} T^†`` for irrep ``lam``, read off outer copy ``p = 1``.

    ``columns`` optionally restricts the input labels (as ``(occ, r)`` pairs),
    which is all the coincident-input states need.
    """
    U = as_matrix(U)
    lam = tuple(lam)
    if sum(lam) != T.N or U.shape[0] != T.d:
        raise TransformMismatchError(f"irrep {lam} on {U.shape[0]} modes does not match transform {(T.N, T.d)}")
    labels = irrep_labels(lam, T.d)
    col_labels = labels if columns is None else tuple(columns)
    states = product_states(T.N, T.d)
    occs = list(dict.fromkeys(occ for occ, _ in labels))
    col_occs = list(dict.fromkeys(occ for occ, _ in col_labels))
    vecs = {occ: T.vectors(lam, 1, occ) for occ in set(occs) | set(col_occs)}
    pos = {lab: i for i, lab in enumerate(labels)}
    cpos = {lab: i for i, lab in enumerate(col_labels)}
    out = np.zeros((len(labels), len(col_labels)), dtype=complex)
    for mu in occs:
        bm = T.blocks[mu]
        rows = [pos[(mu, r)] for r in range(1, len(vecs[mu]) + 1)]
        for nu in col_occs:
            bn = T.blocks[nu]
            P = tensor_power_block(U, states[bm.cols], states[bn.cols])
            sub = vecs[mu] @ P @ vecs[nu].conj().T
            want = [r for r in range(1, len(vecs[nu]) + 1) if (nu, r) in cpos]
            for r in want:
                out[rows, cpos[(nu, r)]] = sub[:, r - 1]
    return IrrepBlock(lam, out, labels if columns is None else (labels, col_labels))
