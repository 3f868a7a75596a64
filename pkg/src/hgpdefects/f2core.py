"""Dense bit-packed linear algebra over GF(2).

Rows are packed little-endian into ``uint64`` words: column ``j`` of a row
lives in word ``j // 64`` at bit ``j % 64``.  Padding bits past ``cols`` are
always zero, so word-level equality and XOR are exact.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

WORD = 64


class ShapeError(ValueError):
    """Operands have incompatible shapes."""


def _nwords(cols: int) -> int:
    return max(1, (cols + WORD - 1) // WORD)


def _pack(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    nw = _nwords(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = dense & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").reshape(rows, nw).astype(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(as_bytes.reshape(rows, -1), axis=1, bitorder="little")
    return bits[:, :cols].copy()


def as_bits(v, length: int | None = None) -> np.ndarray:
    """Coerce a 0/1 sequence to a uint8 vector, optionally checking its length."""
    arr = np.asarray(v, dtype=np.uint8).reshape(-1) & 1
    if length is not None and arr.shape[0] != length:
        raise ShapeError(f"expected vector of length {length}, got {arr.shape[0]}")
    return arr


class BitMatrix:
    """Immutable GF(2) matrix with bit-packed rows."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ShapeError("negative dimension")
        nw = _nwords(cols)
        if data is None:
            data = np.zeros((rows, nw), dtype=np.uint64)
        else:
            data = np.array(data, dtype=np.uint64, copy=True).reshape(rows, nw)
            rem = cols % WORD
            if rem:
                data[:, -1] &= np.uint64((1 << rem) - 1)
            elif cols == 0:
                data[:] = 0
        data.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self._data = data

    # construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense, cols: int | None = None) -> BitMatrix:
        arr = np.asarray(dense, dtype=np.uint8)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, cols or 0)
        if arr.ndim != 2:
            raise ShapeError("dense input must be 2-dimensional")
        if cols is not None and arr.shape[1] != cols:
            raise ShapeError(f"expected {cols} columns, got {arr.shape[1]}")
        return cls(arr.shape[0], arr.shape[1], _pack(arr & 1))

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], cols: int) -> BitMatrix:
        supports = [list(s) for s in supports]
        dense = np.zeros((len(supports), cols), dtype=np.uint8)
        for i, s in enumerate(supports):
            for j in s:
                if not 0 <= j < cols:
                    raise IndexError(f"column {j} out of range for width {cols}")
                dense[i, j] ^= 1
        return cls.from_dense(dense, cols)

    @classmethod
    def _from_words(cls, words: np.ndarray, cols: int) -> BitMatrix:
        return cls(words.shape[0], cols, words)

    # views ----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def words(self) -> np.ndarray:
        return self._data

    def to_dense(self) -> np.ndarray:
        return _unpack(self._data, self.cols)

    def row(self, i: int) -> np.ndarray:
        return _unpack(self._data[i : i + 1], self.cols)[0]

    def supports(self) -> list[list[int]]:
        dense = self.to_dense()
        return [np.flatnonzero(r).tolist() for r in dense]

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1).astype(np.int64)

    def is_zero(self) -> bool:
        return not self._data.any()

    def nonzero_rows(self) -> np.ndarray:
        return np.flatnonzero(self._data.any(axis=1))

    def take_rows(self, idx: Sequence[int]) -> BitMatrix:
        idx = np.asarray(idx, dtype=np.int64).reshape(-1)
        return BitMatrix._from_words(self._data[idx], self.cols)

    def take_cols(self, idx: Sequence[int]) -> BitMatrix:
        idx = np.asarray(idx, dtype=np.int64).reshape(-1)
        return BitMatrix.from_dense(self.to_dense()[:, idx], len(idx))

    def mask_cols(self, keep: Iterable[int]) -> BitMatrix:
        """Zero every column outside ``keep`` (multiplication by a projector)."""
        mask = np.zeros((1, self.cols), dtype=np.uint8)
        for j in keep:
            mask[0, j] = 1
        return BitMatrix._from_words(self._data & _pack(mask), self.cols)

    def mask_rows(self, keep: Iterable[int]) -> BitMatrix:
        sel = np.zeros(self.rows, dtype=bool)
        sel[list(keep)] = True
        data = self._data.copy()
        data[~sel] = 0
        return BitMatrix._from_words(data, self.cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    @property
    def T(self) -> BitMatrix:
        return transpose(self)


# arithmetic ---------------------------------------------------------------


def transpose(m: BitMatrix) -> BitMatrix:
    return BitMatrix.from_dense(m.to_dense().T.copy(), m.rows)


def add(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.shape != b.shape:
        raise ShapeError(f"add: {a.shape} vs {b.shape}")
    return BitMatrix._from_words(a.words ^ b.words, a.cols)


def matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise ShapeError(f"matmul: {a.shape} @ {b.shape}")
    out = np.zeros((a.rows, _nwords(b.cols)), dtype=np.uint64)
    if a.rows and b.rows:
        ad = a.to_dense().astype(bool)
        bw = b.words
        for i in range(a.rows):
            sel = bw[ad[i]]
            if sel.shape[0]:
                out[i] = np.bitwise_xor.reduce(sel, axis=0)
    return BitMatrix._from_words(out, b.cols)


def kron(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Kronecker product: entry (i*rows_b + j, k*cols_b + l) = a[i,k] * b[j,l]."""
    dense = np.kron(a.to_dense(), b.to_dense()).astype(np.uint8)
    return BitMatrix.from_dense(dense.reshape(a.rows * b.rows, a.cols * b.cols), a.cols * b.cols)


def hstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    rows = {m.rows for m in mats}
    if len(rows) != 1:
        raise ShapeError("hstack: row counts differ")
    dense = np.hstack([m.to_dense() for m in mats])
    return BitMatrix.from_dense(dense, sum(m.cols for m in mats))


def vstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    cols = {m.cols for m in mats}
    if len(cols) != 1:
        raise ShapeError("vstack: column counts differ")
    (c,) = cols
    return BitMatrix._from_words(np.vstack([m.words for m in mats]), c)


def matvec(m: BitMatrix, v) -> np.ndarray:
    """Return ``m @ v`` for a column vector ``v``."""
    v = as_bits(v, m.cols)
    return ((m.to_dense().astype(np.int64) @ v.astype(np.int64)) & 1).astype(np.uint8)


def vecmat(v, m: BitMatrix) -> np.ndarray:
    """Return ``v @ m`` for a row vector ``v``."""
    v = as_bits(v, m.rows)
    return matmul(BitMatrix.from_dense(v.reshape(1, -1), m.rows), m).row(0)


# elimination ------------------------------------------------------------------


def _eliminate(words: np.ndarray, ncols: int, track: np.ndarray | None = None):
    """Reduce ``words`` in place to reduced row echelon form over its first ``ncols`` columns.

    ``track`` (if given) receives the same row operations.  Returns pivot columns.
    """
    rows = words.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        w, bit = divmod(c, WORD)
        col = (words[r:, w] >> np.uint64(bit)) & np.uint64(1)
        hits = np.flatnonzero(col)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
            if track is not None:
                track[[r, p]] = track[[p, r]]
        others = np.flatnonzero((words[:, w] >> np.uint64(bit)) & np.uint64(1))
        others = others[others != r]
        if others.size:
            words[others] ^= words[r]
            if track is not None:
                track[others] ^= track[r]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    words = m.words.copy()
    pivots = _eliminate(words, m.cols)
    return BitMatrix._from_words(words[: len(pivots)], m.cols), pivots


def rank(m: BitMatrix) -> int:
    return len(rref(m)[1])


def row_basis(m: BitMatrix) -> BitMatrix:
    """Canonical basis of the row space (the nonzero rows of the RREF)."""
    return rref(m)[0]


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of {x : m x = 0}, returned in reduced echelon form."""
    r, pivots = rref(m)
    n = m.cols
    free = [c for c in range(n) if c not in set(pivots)]
    if not free:
        return BitMatrix.zeros(0, n)
    rd = r.to_dense()
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for j, p in enumerate(pivots):
            basis[i, p] = rd[j, f]
    return row_basis(BitMatrix.from_dense(basis, n))


def left_kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis of {y : y m = 0}."""
    return kernel_basis(transpose(m))


def quotient_basis(m: BitMatrix) -> BitMatrix:
    """Coset representatives of F^cols / rowspace(m): unit vectors on non-pivot columns."""
    _, pivots = rref(m)
    piv = set(pivots)
    free = [c for c in range(m.cols) if c not in piv]
    return BitMatrix.from_supports([[c] for c in free], m.cols)


def solve_left(m: BitMatrix, v) -> np.ndarray | None:
    """Return some x with ``x @ m == v``, or None when v is outside the row space."""
    v = as_bits(v, m.cols)
    words = m.words.copy()
    track = _pack(np.eye(m.rows, dtype=np.uint8)) if m.rows else np.zeros((0, 1), np.uint64)
    pivots = _eliminate(words, m.cols, track)
    target = _pack(v.reshape(1, -1))[0]
    coeff = np.zeros(_nwords(m.rows), dtype=np.uint64)
    for i, c in enumerate(pivots):
        w, bit = divmod(c, WORD)
        if (target[w] >> np.uint64(bit)) & np.uint64(1):
            target ^= words[i]
            coeff ^= track[i]
    if target.any():
        return None
    return _unpack(coeff.reshape(1, -1), m.rows)[0]


def row_space_contains(m: BitMatrix, v) -> bool:
    return solve_left(m, v) is not None


def independent_extension(seed: BitMatrix, candidates: BitMatrix) -> list[int]:
    """Greedy rank extension: indices of candidate rows that enlarge span(seed + kept)."""
    basis = row_basis(seed)
    kept: list[int] = []
    cur = rank(basis)
    for i in range(candidates.rows):
        trial = vstack([basis, candidates.take_rows([i])])
        rt = rank(trial)
        if rt > cur:
            basis = row_basis(trial)
            cur = rt
            kept.append(i)
    return kept
