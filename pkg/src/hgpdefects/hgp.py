"""Hypergraph product of a classical code with itself."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .f2core import (
    BitMatrix,
    _pack,
    hstack,
    kernel_basis,
    kron,
    left_kernel_basis,
    matmul,
    quotient_basis,
    rank,
    transpose,
    vstack,
)
from .pauli import pair_css


@dataclass(frozen=True)
class DistanceBound:
    """Marker for an exhausted weight budget: the distance exceeds ``exceeds``."""

    exceeds: int

    def __str__(self) -> str:
        return f"d > {self.exceeds}"


class Parameters(NamedTuple):
    n_qubits: int
    k: int
    d: int | DistanceBound | None


@dataclass(frozen=True)
class HgpCode:
    h: BitMatrix
    hx: BitMatrix = field(repr=False)
    hz: BitMatrix = field(repr=False)

    @property
    def n(self) -> int:
        return self.h.cols

    @property
    def m(self) -> int:
        return self.h.rows

    @property
    def n_qubits(self) -> int:
        return self.n * self.n + self.m * self.m

    # index maps ----------------------------------------------------------

    def vv(self, u: int, v: int) -> int:
        return u * self.n + v

    def cc(self, c: int, c2: int) -> int:
        return self.n * self.n + c * self.m + c2

    def x_stab(self, v: int, c: int) -> int:
        return v * self.m + c

    def z_stab(self, c: int, v: int) -> int:
        return c * self.n + v

    def qubit_label(self, q: int) -> tuple[str, int, int]:
        nn = self.n * self.n
        if q < nn:
            return ("VV",) + divmod(q, self.n)
        return ("CC",) + divmod(q - nn, self.m)

    def x_stab_label(self, r: int) -> tuple[int, int]:
        return divmod(r, self.m)

    def z_stab_label(self, r: int) -> tuple[int, int]:
        return divmod(r, self.n)


def build(h: BitMatrix) -> HgpCode:
    if h.is_zero():
        raise ValueError("parity-check matrix must be nonzero")
    m, n = h.shape
    ht = transpose(h)
    hx = hstack([kron(BitMatrix.identity(n), h), kron(ht, BitMatrix.identity(m))])
    hz = hstack([kron(h, BitMatrix.identity(n)), kron(BitMatrix.identity(m), ht)])
    assert matmul(hx, transpose(hz)).is_zero(), "CSS condition violated"
    return HgpCode(h, hx, hz)


def logical_count(code: HgpCode) -> int:
    k = kernel_basis(code.h).rows
    kt = left_kernel_basis(code.h).rows
    return k * k + kt * kt


def _embed(vv: BitMatrix | None, cc: BitMatrix | None, code: HgpCode) -> BitMatrix:
    blocks = []
    nn, mm = code.n * code.n, code.m * code.m
    if vv is not None and vv.rows:
        blocks.append(hstack([vv, BitMatrix.zeros(vv.rows, mm)]))
    if cc is not None and cc.rows:
        blocks.append(hstack([BitMatrix.zeros(cc.rows, nn), cc]))
    if not blocks:
        return BitMatrix.zeros(0, code.n_qubits)
    return vstack(blocks)


def embedded_logical_x_basis(code: HgpCode) -> BitMatrix:
    h, ht = code.h, transpose(code.h)
    vv = kron(kernel_basis(h), quotient_basis(h))
    cc = kron(quotient_basis(ht), left_kernel_basis(h))
    return _embed(vv, cc, code)


def embedded_logical_z_basis(code: HgpCode) -> BitMatrix:
    h, ht = code.h, transpose(code.h)
    vv = kron(quotient_basis(h), kernel_basis(h))
    cc = kron(left_kernel_basis(h), quotient_basis(ht))
    return _embed(vv, cc, code)


def embedded_logical_pairs(code: HgpCode) -> tuple[BitMatrix, BitMatrix]:
    """X basis and a Z basis re-expressed so the pairing matrix is the identity."""
    lx = embedded_logical_x_basis(code)
    lz = embedded_logical_z_basis(code)
    if lx.rows == 0:
        return lx, lz
    return lx, pair_css(lx, lz)


# distance ---------------------------------------------------------------------


def _column_codes(m: BitMatrix) -> np.ndarray:
    return _pack(m.to_dense().T.copy())


def min_logical_weight(
    checks: BitMatrix,
    conj: BitMatrix,
    budget: int,
    max_candidates: int = 20_000_000,
    chunk: int = 250_000,
) -> int | DistanceBound | None:
    """Smallest weight of a vector with zero syndrome under ``checks`` that pairs oddly with some row of ``conj``.

    ``conj`` must be a complete basis of the conjugate logicals, so such vectors
    are exactly the nontrivial logicals.  Returns None when ``conj`` is empty.
    """
    if conj.rows == 0:
        return None
    n = checks.cols
    syn = _column_codes(checks)
    log = _column_codes(conj)
    done = 0
    for w in range(1, min(budget, n) + 1):
        total = 0
        combos = itertools.combinations(range(n), w)
        while True:
            block = list(itertools.islice(combos, chunk))
            if not block:
                break
            total += len(block)
            idx = np.asarray(block, dtype=np.int64)
            s = np.bitwise_xor.reduce(syn[idx], axis=1)
            lg = np.bitwise_xor.reduce(log[idx], axis=1)
            hit = ~s.any(axis=1) & lg.any(axis=1)
            if hit.any():
                return w
            if done + total > max_candidates:
                return DistanceBound(w - 1)
        done += total
    return DistanceBound(min(budget, n))


def css_distance(
    hx: BitMatrix,
    hz: BitMatrix,
    lx: BitMatrix,
    lz: BitMatrix,
    budget: int = 6,
    max_candidates: int = 20_000_000,
) -> int | DistanceBound | None:
    dx = min_logical_weight(hz, lz, budget, max_candidates)
    dz = min_logical_weight(hx, lx, budget, max_candidates)
    vals = [d for d in (dx, dz) if d is not None]
    if not vals:
        return None
    exact = [d for d in vals if isinstance(d, int)]
    if exact:
        return min(exact)
    return DistanceBound(min(d.exceeds for d in vals))


def parameters(code: HgpCode, distance_budget: int | None = 6) -> Parameters:
    k = logical_count(code)
    assert k == code.n_qubits - rank(code.hx) - rank(code.hz)
    if k == 0:
        return Parameters(code.n_qubits, 0, None)
    lx = embedded_logical_x_basis(code)
    lz = embedded_logical_z_basis(code)
    d = css_distance(code.hx, code.hz, lx, lz, budget=distance_budget or 0)
    return Parameters(code.n_qubits, k, d)


def code_report(code: HgpCode, distance_budget: int | None = 6) -> dict:
    p = parameters(code, distance_budget)
    d = p.d
    return {
        "n": code.n,
        "m": code.m,
        "n_qubits": p.n_qubits,
        "k": p.k,
        "d": d if isinstance(d, int) else None,
        "d_bound": str(d) if isinstance(d, DistanceBound) else None,
        "hx": code.hx.supports(),
        "hz": code.hz.supports(),
    }
