"""Pauli operators in symplectic form and symplectic bookkeeping helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .f2core import (
    BitMatrix,
    as_bits,
    hstack,
    independent_extension,
    kernel_basis,
    matmul,
    solve_left,
    transpose,
    vstack,
)


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Pauli operator up to phase: X on ``x`` support, Z on ``z`` support."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = as_bits(self.x)
        z = as_bits(self.z, x.shape[0])
        x.flags.writeable = False
        z.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @classmethod
    def identity(cls, n: int) -> SymplecticOp:
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_supports(cls, n: int, x_support: Iterable[int] = (), z_support: Iterable[int] = ()) -> SymplecticOp:
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        for q in x_support:
            x[q] ^= 1
        for q in z_support:
            z[q] ^= 1
        return cls(x, z)

    @classmethod
    def x_type(cls, vec) -> SymplecticOp:
        v = as_bits(vec)
        return cls(v, np.zeros_like(v))

    @classmethod
    def z_type(cls, vec) -> SymplecticOp:
        v = as_bits(vec)
        return cls(np.zeros_like(v), v)

    @classmethod
    def from_vector(cls, vec) -> SymplecticOp:
        v = as_bits(vec)
        n = v.shape[0] // 2
        return cls(v[:n], v[n:])

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> list[int]:
        return np.flatnonzero(self.x | self.z).tolist()

    def has_y(self) -> bool:
        return bool(np.any(self.x & self.z))

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def commutes(self, other: SymplecticOp) -> bool:
        return symplectic_product(self, other) == 0

    def __mul__(self, other: SymplecticOp) -> SymplecticOp:
        return SymplecticOp(self.x ^ other.x, self.z ^ other.z)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticOp):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def to_json(self) -> dict:
        return {
            "x_support": np.flatnonzero(self.x).tolist(),
            "z_support": np.flatnonzero(self.z).tolist(),
        }

    @classmethod
    def from_json(cls, n: int, obj: dict) -> SymplecticOp:
        return cls.from_supports(n, obj.get("x_support", ()), obj.get("z_support", ()))

    def __repr__(self) -> str:
        xs = np.flatnonzero(self.x).tolist()
        zs = np.flatnonzero(self.z).tolist()
        return f"SymplecticOp(x={xs}, z={zs})"


def symplectic_product(a: SymplecticOp, b: SymplecticOp) -> int:
    return int((np.dot(a.x, b.z) + np.dot(a.z, b.x)) & 1)


def ops_matrix(ops: Sequence[SymplecticOp], n: int | None = None) -> BitMatrix:
    """Stack operators as rows of an (x | z) matrix."""
    if not ops:
        if n is None:
            raise ValueError("width needed for an empty operator list")
        return BitMatrix.zeros(0, 2 * n)
    return BitMatrix.from_dense(np.vstack([op.vector() for op in ops]))


def ops_from_matrix(m: BitMatrix) -> list[SymplecticOp]:
    return [SymplecticOp.from_vector(r) for r in m.to_dense()]


def css_matrix(hx: BitMatrix | None, hz: BitMatrix | None, n: int) -> BitMatrix:
    """Symplectic generator matrix for X rows ``hx`` then Z rows ``hz``."""
    blocks = []
    if hx is not None and hx.rows:
        blocks.append(hstack([hx, BitMatrix.zeros(hx.rows, n)]))
    if hz is not None and hz.rows:
        blocks.append(hstack([BitMatrix.zeros(hz.rows, n), hz]))
    if not blocks:
        return BitMatrix.zeros(0, 2 * n)
    return vstack(blocks)


def _swap_halves(m: BitMatrix) -> BitMatrix:
    n = m.cols // 2
    d = m.to_dense()
    return BitMatrix.from_dense(np.hstack([d[:, n:], d[:, :n]]), m.cols)


def symplectic_gram(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix of symplectic products between rows of ``a`` and rows of ``b``."""
    return matmul(a, transpose(_swap_halves(b)))


def commutation_violations(ops: Sequence[SymplecticOp]) -> list[tuple[int, int]]:
    if not ops:
        return []
    m = ops_matrix(ops)
    g = symplectic_gram(m, m).to_dense()
    ii, jj = np.nonzero(np.triu(g, 1))
    return list(zip(ii.tolist(), jj.tolist()))


def centralizer_basis(stabs: BitMatrix) -> BitMatrix:
    """All symplectic vectors commuting with every row of ``stabs``."""
    return kernel_basis(_swap_halves(stabs))


def symplectic_pairs(candidates: Sequence[SymplecticOp]) -> list[tuple[SymplecticOp, SymplecticOp]]:
    """Symplectic Gram-Schmidt; candidates must span a nondegenerate space."""
    pool = list(candidates)
    pairs: list[tuple[SymplecticOp, SymplecticOp]] = []
    while pool:
        a = pool.pop(0)
        j = next((i for i, b in enumerate(pool) if symplectic_product(a, b)), None)
        if j is None:
            raise ValueError("degenerate logical space: operator without conjugate")
        b = pool.pop(j)
        fixed = []
        for c in pool:
            if symplectic_product(c, b):
                c = c * a
            if symplectic_product(c, a):
                c = c * b
            fixed.append(c)
        pool = fixed
        pairs.append((a, b))
    return pairs


def logical_pairs(stabs: BitMatrix, n: int) -> list[tuple[SymplecticOp, SymplecticOp]]:
    """A symplectic basis of logical operators for the stabilizer group spanned by ``stabs``."""
    if stabs.rows == 0:
        stabs = BitMatrix.zeros(0, 2 * n)
    cent = centralizer_basis(stabs)
    keep = independent_extension(stabs, cent)
    return symplectic_pairs(ops_from_matrix(cent.take_rows(keep)))


def inverse(m: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible matrix."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    rows = []
    for i in range(m.rows):
        e = np.zeros(m.cols, np.uint8)
        e[i] = 1
        x = solve_left(m, e)
        if x is None:
            raise ValueError("matrix is singular")
        rows.append(x)
    if not rows:
        return BitMatrix.zeros(0, 0)
    return BitMatrix.from_dense(np.vstack(rows), m.cols)


def pair_css(lx: BitMatrix, lz: BitMatrix) -> BitMatrix:
    """Re-express ``lz`` so that ``lx @ lz.T`` is the identity."""
    g = matmul(lx, transpose(lz))
    return matmul(transpose(inverse(g)), lz)
