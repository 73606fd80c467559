"""Schur-Weyl change of basis for N qudits of dimension d.

The transform maps the product basis of ``(C^d)^{⊗N}`` onto basis states
labelled ``(lam, p, occ, r)``: ``lam`` the irrep, ``p`` the outer (S_N)
multiplicity, ``occ`` the weight and ``r`` the inner multiplicity. Every
basis vector is supported on product states of its own weight, so the
transform is stored as one square block per weight rather than as a dense
``d^N x d^N`` matrix.

Construction, per irrep ``lam``:

1. one highest-weight vector per standard tableau, built as a product of
   Slater determinants over the tableau's columns (a polytabloid);
2. Gram-Schmidt over those vectors gives the ``sym_dim(lam)`` outer copies;
3. the first copy is lowered with ``E_{i+1,i}`` weight by weight, with
   pivoted Gram-Schmidt picking ``kostka(lam, occ)`` vectors per weight;
4. the same lowering recipe is replayed on every other copy, so all copies
   carry identical irrep matrices.

For ``N == d >= 3`` the inner space of ``(N-1, 1)`` at the coincident weight
is finally rotated so that ``r = 1`` is the direction populated when a single
photon in the last mode carries a different label.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import os
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .combinatorics import (
    Occupation,
    Partition,
    coincident,
    enumerate_occupations,
    enumerate_partitions,
    enumerate_syt,
    irrep_weights,
    kostka,
    sym_dim,
    unitary_dim,
)
from .errors import (
    BudgetExceededError,
    CacheChecksumError,
    CacheMissingError,
    CacheVersionError,
    InternalConsistencyError,
    NumericDegeneracyError,
    TransformMismatchError,
)

MAX_PRODUCT_DIM = 300_000
ORTHONORMAL_TOL = 1e-12
INDEPENDENCE_TOL = 1e-10
CACHE_FORMAT_VERSION = 1
CACHE_ENV_VAR = "DISTINGUISH_CACHE"
_MAGIC = b"SWTCACHE"


class BasisLabel(NamedTuple):
    lam: Partition
    p: int
    occ: Occupation
    r: int


@dataclass(frozen=True)
class WeightBlock:
    """Rows of the transform supported on one weight.

    ``rows`` index into ``SchurWeylTransform.labels``; ``cols`` are product
    basis indices; ``matrix[i, j] = <labels[rows[i]] | cols[j]>``.
    """

    occ: Occupation
    rows: np.ndarray
    cols: np.ndarray
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class SchurWeylTransform:
    N: int
    d: int
    labels: tuple[BasisLabel, ...]
    blocks: dict[Occupation, WeightBlock]
    label_index: dict[BasisLabel, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.d**self.N

    @property
    def partitions(self) -> tuple[Partition, ...]:
        return enumerate_partitions(self.N, self.d)

    @property
    def matrix(self) -> np.ndarray:
        """Dense ``d^N x d^N`` complex matrix; only sensible for small (N, d)."""
        if self.dim > 5000:
            raise BudgetExceededError(f"dense transform of size {self.dim} requested")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for blk in self.blocks.values():
            out[np.ix_(blk.rows, blk.cols)] = blk.matrix
        return out

    def vectors(self, lam: Partition, p: int, occ: Occupation) -> np.ndarray:
        """``(kostka, m)`` array: basis vectors of copy ``p`` of ``lam`` at weight ``occ``.

        Columns follow ``self.blocks[occ].cols``.
        """
        blk = self.blocks[tuple(occ)]
        sel = [i for i, row in enumerate(blk.rows) if self.labels[row].lam == lam and self.labels[row].p == p]
        return blk.matrix[sel]

    def check_compatible(self, N: int, d: int) -> None:
        if (self.N, self.d) != (N, d):
            raise TransformMismatchError(f"transform is for (N, d) = {(self.N, self.d)}, need {(N, d)}")


# --------------------------------------------------------------------------
# product basis bookkeeping


@lru_cache(maxsize=16)
def product_states(N: int, d: int) -> np.ndarray:
    """``(d^N, N)`` array of mode indices; particle 0 is the most significant digit."""
    idx = np.arange(d**N)
    powers = d ** np.arange(N - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % d


@lru_cache(maxsize=16)
def _weight_index(N: int, d: int) -> tuple[dict[Occupation, np.ndarray], np.ndarray]:
    states = product_states(N, d)
    counts = np.stack([(states == m).sum(axis=1) for m in range(d)], axis=1)
    groups: dict[Occupation, list[int]] = {}
    for i, c in enumerate(map(tuple, counts.tolist())):
        groups.setdefault(c, []).append(i)
    index = {occ: np.array(v, dtype=np.int64) for occ, v in groups.items()}
    position = np.empty(d**N, dtype=np.int64)
    for v in index.values():
        position[v] = np.arange(len(v))
    return index, position


def product_index(modes, d: int) -> int:
    out = 0
    for m in modes:
        out = out * d + int(m)
    return out


class _Lowering:
    """Lowering operators ``E_{i+1,i}`` acting between weight spaces."""

    def __init__(self, N: int, d: int):
        self.N, self.d = N, d
        self.index, self.position = _weight_index(N, d)
        self.states = product_states(N, d)
        self._maps: dict = {}

    def _map(self, occ: Occupation, i: int):
        key = (occ, i)
        if key not in self._maps:
            src_idx = self.index[occ]
            sub = self.states[src_idx]
            src, dst = [], []
            for k in range(self.N):
                hit = np.nonzero(sub[:, k] == i)[0]
                src.append(hit)
                dst.append(self.position[src_idx[hit] + self.d ** (self.N - 1 - k)])
            self._maps[key] = (np.concatenate(src), np.concatenate(dst))
        return self._maps[key]

    def apply(self, vec: np.ndarray, occ: Occupation, i: int) -> tuple[Occupation, np.ndarray]:
        target = list(occ)
        target[i] -= 1
        target[i + 1] += 1
        target = tuple(target)
        src, dst = self._map(occ, i)
        out = np.bincount(dst, weights=vec[src], minlength=len(self.index[target]))
        return target, out


def _polytabloid(tab, N: int, d: int, index, position) -> np.ndarray:
    """Highest-weight vector for a standard tableau: one Slater determinant per column."""
    lam = tuple(len(row) for row in tab)
    occ = tuple(lam) + (0,) * (d - len(lam))
    columns = [[tab[i][j] - 1 for i in range(len(tab)) if len(tab[i]) > j] for j in range(lam[0])]
    vec = np.zeros(len(index[occ]))
    for perms in itertools.product(*(itertools.permutations(range(len(c))) for c in columns)):
        modes = [0] * N
        sign = 1
        for col, perm in zip(columns, perms):
            sign *= _perm_sign(perm)
            for row, particle in zip(perm, col):
                modes[particle] = row
        vec[position[product_index(modes, d)]] += sign
    return vec


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _pivoted_gram_schmidt(candidates: list[np.ndarray], count: int, what: str):
    """Pick ``count`` orthonormal vectors, always taking the largest residual next.

    Returns the chosen vectors and, for each, ``(candidate index, projection
    coefficients onto earlier picks, norm)`` so the same combination can be
    replayed on another copy.
    """
    residuals = [c.astype(float, copy=True) for c in candidates]
    scale = [max(np.linalg.norm(c), 1e-300) for c in candidates]
    chosen: list[np.ndarray] = []
    recipe = []
    used: set[int] = set()
    for _ in range(count):
        best, best_norm = -1, -1.0
        for j, res in enumerate(residuals):
            if j in used:
                continue
            nrm = np.linalg.norm(res) / scale[j]
            if nrm > best_norm:
                best, best_norm = j, nrm
        if best < 0 or best_norm < INDEPENDENCE_TOL:
            raise NumericDegeneracyError(f"{what}: found {len(chosen)} of {count} independent vectors")
        used.add(best)
        c = candidates[best]
        if chosen:
            Q = np.array(chosen)
            coef = Q @ c
            v = c - coef @ Q
            coef2 = Q @ v
            v = v - coef2 @ Q
            coef = coef + coef2
        else:
            coef = np.zeros(0)
            v = c.astype(float, copy=True)
        nrm = np.linalg.norm(v)
        v = v / nrm
        chosen.append(v)
        recipe.append((best, coef, nrm))
        # update residuals of the remaining candidates
        for j in range(len(residuals)):
            if j not in used:
                residuals[j] = residuals[j] - (v @ residuals[j]) * v
    return chosen, recipe


def _replay(candidates: list[np.ndarray], recipe) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for best, coef, nrm in recipe:
        v = candidates[best]
        if out:
            v = v - coef @ np.array(out)
        out.append(v / nrm)
    return out


def _level(occ: Occupation) -> int:
    return sum(k * n for k, n in enumerate(occ))


def _irrep_copies(lam: Partition, N: int, d: int, low: _Lowering):
    """Basis vectors of every copy of ``lam``: ``{p: {occ: (K, m) array}}``."""
    hw_occ = tuple(lam) + (0,) * (d - len(lam))
    polys = [_polytabloid(t, N, d, low.index, low.position) for t in enumerate_syt(lam)]
    # plain Gram-Schmidt so outer labels follow tableau order
    highest = _ordered_gram_schmidt(polys)

    weights = sorted(irrep_weights(lam, d), key=lambda w: (_level(w), tuple(-x for x in w)))
    assert weights[0] == hw_occ

    copies: dict[int, dict[Occupation, np.ndarray]] = {}
    first: dict[Occupation, list[np.ndarray]] = {hw_occ: [highest[0]]}
    recipes: dict[Occupation, tuple[list, list]] = {}
    for occ in weights[1:]:
        sources, cands = [], []
        for i in range(d - 1):
            if occ[i + 1] == 0:
                continue
            src = list(occ)
            src[i] += 1
            src[i + 1] -= 1
            src = tuple(src)
            if src not in first:
                continue
            for r, vec in enumerate(first[src]):
                sources.append((src, r, i))
                cands.append(low.apply(vec, src, i)[1])
        vecs, recipe = _pivoted_gram_schmidt(cands, kostka(lam, occ), f"weight {occ} of {lam}")
        first[occ] = vecs
        recipes[occ] = (sources, recipe)
    copies[1] = {occ: np.array(v) for occ, v in first.items()}

    for p in range(2, len(highest) + 1):
        cur: dict[Occupation, list[np.ndarray]] = {hw_occ: [highest[p - 1]]}
        for occ in weights[1:]:
            sources, recipe = recipes[occ]
            cands = [low.apply(cur[src][r], src, i)[1] for src, r, i in sources]
            cur[occ] = _replay(cands, recipe)
        copies[p] = {occ: np.array(v) for occ, v in cur.items()}
    return copies


def _ordered_gram_schmidt(vectors: list[np.ndarray]) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vectors:
        w = v.astype(float, copy=True)
        for _ in range(2):
            for q in out:
                w = w - (q @ w) * q
        nrm = np.linalg.norm(w)
        if nrm < INDEPENDENCE_TOL * max(np.linalg.norm(v), 1.0):
            raise NumericDegeneracyError("standard polytabloids are linearly dependent")
        out.append(w / nrm)
    return out


def _singly_rotation(copies, N: int, d: int, low: _Lowering) -> None:
    """Rotate the coincident inner space of ``(N-1, 1)`` in place.

    After rotation, r = 1 spans the System component of a state whose photon in
    the last mode carries its own label.
    """
    ones = coincident(N)
    cols = low.index[ones]
    states = low.states[cols]
    rows = []
    for particle in range(N):
        vec = (states[:, particle] == d - 1).astype(float)
        vec /= np.linalg.norm(vec)
        for p in copies:
            rows.append(copies[p][ones] @ vec)
    C = np.array(rows)
    _, s, vt = np.linalg.svd(C)
    if len(s) > 1 and s[1] > 1e-9 * s[0]:
        raise InternalConsistencyError("marked-photon component is not rank one")
    phi = vt[0]
    if phi[np.argmax(np.abs(phi))] < 0:
        phi = -phi
    K = len(phi)
    Q, _ = np.linalg.qr(np.column_stack([phi, np.eye(K)]))
    Q = Q[:, :K]
    if Q[:, 0] @ phi < 0:
        Q[:, 0] = -Q[:, 0]
    for p in copies:
        copies[p][ones] = Q.T @ copies[p][ones]


def build_transform(N: int, d: int, max_dim: int = MAX_PRODUCT_DIM) -> SchurWeylTransform:
    """Build the Schur-Weyl transform for ``N`` qudits of dimension ``d``."""
    if N < 1 or d < 2:
        raise ValueError("need N >= 1 and d >= 2")
    if d**N > max_dim:
        raise BudgetExceededError(f"d^N = {d**N} exceeds the cap of {max_dim}")
    low = _Lowering(N, d)
    per_irrep = {}
    for lam in enumerate_partitions(N, d):
        copies = _irrep_copies(lam, N, d, low)
        if N == d and N >= 3 and lam == (N - 1, 1):
            _singly_rotation(copies, N, d, low)
        per_irrep[lam] = copies

    labels: list[BasisLabel] = []
    rows_by_weight: dict[Occupation, list[int]] = {}
    vecs_by_weight: dict[Occupation, list[np.ndarray]] = {}
    for lam, copies in per_irrep.items():
        for p in range(1, sym_dim(lam) + 1):
            for occ in irrep_weights(lam, d):
                for r, vec in enumerate(copies[p][occ], start=1):
                    rows_by_weight.setdefault(occ, []).append(len(labels))
                    vecs_by_weight.setdefault(occ, []).append(vec)
                    labels.append(BasisLabel(lam, p, occ, r))

    blocks = {}
    for occ in enumerate_occupations(N, d):
        mat = np.array(vecs_by_weight[occ])
        cols = low.index[occ]
        if mat.shape != (len(cols), len(cols)):
            raise InternalConsistencyError(f"weight {occ}: block shape {mat.shape}, expected {len(cols)}")
        blocks[occ] = WeightBlock(occ, np.array(rows_by_weight[occ], dtype=np.int64), cols, mat)
    T = SchurWeylTransform(N, d, tuple(labels), blocks, {lab: i for i, lab in enumerate(labels)})
    dev = unitarity_deviation(T)
    if dev > ORTHONORMAL_TOL * 100:
        raise InternalConsistencyError(f"transform not unitary: deviation {dev:.3g}")
    return T


def unitarity_deviation(T: SchurWeylTransform) -> float:
    dev = 0.0
    for blk in T.blocks.values():
        m = blk.matrix
        gram = m @ m.conj().T
        dev = max(dev, float(np.abs(gram - np.eye(len(gram))).max()))
    return dev


# --------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    N: int
    d: int
    unitarity: float
    weight_leak: float
    off_block: float
    copy_mismatch: float
    trials: int

    @property
    def max_deviation(self) -> float:
        return max(self.unitarity, self.weight_leak, self.off_block, self.copy_mismatch)

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_deviation < tol


def haar_unitary(d: int, rng) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def tensor_power_block(U: np.ndarray, out_states: np.ndarray, in_states: np.ndarray) -> np.ndarray:
    """``<x|U^{⊗N}|y>`` for product states ``x`` in ``out_states`` and ``y`` in ``in_states``."""
    out = np.ones((len(out_states), len(in_states)), dtype=complex)
    for k in range(out_states.shape[1]):
        out *= U[np.ix_(out_states[:, k], in_states[:, k])]
    return out


def verify_transform(T: SchurWeylTransform, unitaries=None, trials: int = 5, seed: int = 0) -> VerificationReport:
    """Check unitarity, weight preservation and equivariance of ``T``.

    ``unitaries`` may be a single ``d x d`` matrix or a list; if omitted,
    ``trials`` Haar-random unitaries are drawn from ``seed``.
    """
    if unitaries is None:
        rng = np.random.default_rng(seed)
        unitaries = [haar_unitary(T.d, rng) for _ in range(trials)]
    elif isinstance(unitaries, np.ndarray) and unitaries.ndim == 2:
        unitaries = [unitaries]
    unitaries = [np.asarray(getattr(u, "matrix", u), dtype=complex) for u in unitaries]

    states = product_states(T.N, T.d)
    leak = 0.0
    for occ, blk in T.blocks.items():
        counts = np.stack([(states[blk.cols] == m).sum(axis=1) for m in range(T.d)], axis=1)
        if not (counts == np.array(occ)).all():
            leak = np.inf
        if any(T.labels[i].occ != occ for i in blk.rows):
            leak = np.inf

    # per block: irrep/copy group of each row and the position of its p = 1 twin
    meta = {}
    groups = {}
    for occ, blk in T.blocks.items():
        pos = {T.labels[i]: a for a, i in enumerate(blk.rows)}
        grp = np.array([groups.setdefault((T.labels[i].lam, T.labels[i].p), len(groups)) for i in blk.rows])
        twin = np.array([pos[T.labels[i]._replace(p=1)] for i in blk.rows])
        meta[occ] = (grp, twin)
    off, mismatch = 0.0, 0.0
    occs = list(T.blocks)
    for U in unitaries:
        off_sq = 0.0
        for mu in occs:
            bm = T.blocks[mu]
            gm, tm = meta[mu]
            for nu in occs:
                bn = T.blocks[nu]
                gn, tn = meta[nu]
                W = bm.matrix @ tensor_power_block(U, states[bm.cols], states[bn.cols]) @ bn.matrix.conj().T
                same = gm[:, None] == gn[None, :]
                off_sq += float(np.sum(np.abs(W[~same]) ** 2))
                if same.any():
                    ref = W[np.ix_(tm, tn)]
                    mismatch = max(mismatch, float(np.abs(W - ref)[same].max()))
        off = max(off, math.sqrt(off_sq))
    return VerificationReport(T.N, T.d, unitarity_deviation(T), leak, off, mismatch, len(unitaries))


# --------------------------------------------------------------------------
# on-disk cache


def cache_dir(path=None) -> Path:
    if path is not None:
        return Path(path)
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "distinguish"


def cache_path(N: int, d: int, directory=None) -> Path:
    return cache_dir(directory) / f"schur_weyl_N{N}_d{d}.bin"


def _encode(T: SchurWeylTransform) -> bytes:
    d = T.d
    parts = [struct.pack("<IIII", CACHE_FORMAT_VERSION, T.N, T.d, T.dim), struct.pack("<I", len(T.labels))]
    lab_fmt = f"<{d}HI{d}HI"
    for lab in T.labels:
        lam = tuple(lab.lam) + (0,) * (d - len(lab.lam))
        parts.append(struct.pack(lab_fmt, *lam, lab.p, *lab.occ, lab.r))
    parts.append(struct.pack("<I", len(T.blocks)))
    for occ, blk in T.blocks.items():
        n = len(blk.rows)
        parts.append(struct.pack(f"<{d}HI", *occ, n))
        parts.append(blk.rows.astype("<u4").tobytes())
        parts.append(blk.cols.astype("<u4").tobytes())
        parts.append(np.ascontiguousarray(blk.matrix, dtype="<c16").tobytes())
    return b"".join(parts)


def save_cache(T: SchurWeylTransform, directory=None) -> Path:
    """Write ``T`` atomically (temp file then rename)."""
    path = cache_path(T.N, T.d, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = _encode(T)
    checksum = hashlib.blake2b(payload, digest_size=8).digest()
    tmp = path.with_name(f"{path.name}.{os.getpid()}.tmp")
    with open(tmp, "wb") as fh:
        fh.write(_MAGIC + payload + checksum)
    os.replace(tmp, path)
    return path


def load_cache(N: int, d: int, directory=None) -> SchurWeylTransform:
    path = cache_path(N, d, directory)
    if not path.exists():
        raise CacheMissingError(f"no cached transform at {path}")
    raw = path.read_bytes()
    if raw[: len(_MAGIC)] != _MAGIC or len(raw) < len(_MAGIC) + 24:
        raise CacheVersionError(f"{path} is not a transform cache file")
    payload, checksum = raw[len(_MAGIC) : -8], raw[-8:]
    if hashlib.blake2b(payload, digest_size=8).digest() != checksum:
        raise CacheChecksumError(f"checksum mismatch in {path}")
    version, fN, fd, dim = struct.unpack_from("<IIII", payload, 0)
    if version != CACHE_FORMAT_VERSION:
        raise CacheVersionError(f"{path} has format version {version}, expected {CACHE_FORMAT_VERSION}")
    if (fN, fd) != (N, d):
        raise TransformMismatchError(f"{path} holds (N, d) = {(fN, fd)}")
    off = 16
    (n_labels,) = struct.unpack_from("<I", payload, off)
    off += 4
    lab_fmt = f"<{d}HI{d}HI"
    size = struct.calcsize(lab_fmt)
    labels = []
    for _ in range(n_labels):
        vals = struct.unpack_from(lab_fmt, payload, off)
        off += size
        lam = tuple(x for x in vals[:d] if x > 0)
        labels.append(BasisLabel(lam, vals[d], tuple(vals[d + 1 : 2 * d + 1]), vals[2 * d + 1]))
    (n_blocks,) = struct.unpack_from("<I", payload, off)
    off += 4
    blocks = {}
    head = f"<{d}HI"
    for _ in range(n_blocks):
        vals = struct.unpack_from(head, payload, off)
        off += struct.calcsize(head)
        occ, n = tuple(vals[:d]), vals[d]
        rows = np.frombuffer(payload, dtype="<u4", count=n, offset=off).astype(np.int64)
        off += 4 * n
        cols = np.frombuffer(payload, dtype="<u4", count=n, offset=off).astype(np.int64)
        off += 4 * n
        mat = np.frombuffer(payload, dtype="<c16", count=n * n, offset=off).reshape(n, n)
        off += 16 * n * n
        if not mat.imag.any():
            mat = mat.real.copy()
        else:
            mat = mat.copy()
        blocks[occ] = WeightBlock(occ, rows, cols, mat)
    labels_t = tuple(labels)
    return SchurWeylTransform(N, d, labels_t, blocks, {lab: i for i, lab in enumerate(labels_t)})


_MEMO: dict[tuple[int, int], SchurWeylTransform] = {}


def get_transform(N: int, d: int, directory=None, use_disk: bool = True) -> SchurWeylTransform:
    """Return the transform for ``(N, d)`` from memory, the disk cache, or a fresh build."""
    key = (N, d)
    if key not in _MEMO:
        T = None
        if use_disk:
            try:
                T = load_cache(N, d, directory)
            except (CacheMissingError, OSError):
                T = None
        _MEMO[key] = T if T is not None else build_transform(N, d)
    return _MEMO[key]


def dimension_table(N: int, d: int) -> list[tuple[Partition, int, int]]:
    """``(lam, unitary_dim, sym_dim)`` for every irrep appearing for (N, d)."""
    return [(lam, unitary_dim(lam, d), sym_dim(lam)) for lam in enumerate_partitions(N, d)]
