"""Smooth and rough punctures of hypergraph product codes.

A smooth puncture on variables ``S`` and checks ``T`` deletes the Z
stabilizers ``T x S``, measures the interior qubits ``(B x S) u (T x A)`` in
the X basis and truncates the X stabilizers that touched them.  A rough
puncture is the same construction seen through the transposition
``(u, v) -> (v, u)``, ``(c, c') -> (c', c)`` that swaps X and Z stabilizers,
so it is implemented by relabelling the smooth case.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .f2core import (
    BitMatrix,
    add,
    independent_extension,
    kernel_basis,
    kron,
    left_kernel_basis,
    matmul,
    quotient_basis,
    rank,
    transpose,
    vstack,
)
from .fgraph import (
    CHECK,
    VAR,
    FactorGraph,
    NodeSet,
    ancestor,
    induced_sets,
    is_connected,
)
from .hgp import HgpCode, logical_count

SMOOTH = "smooth"
ROUGH = "rough"


class CorrectabilityError(ValueError):
    """The requested puncture would erase encoded information."""


@dataclass(frozen=True)
class PunctureSpec:
    kind: str
    S: NodeSet
    T: NodeSet
    N: NodeSet
    A: NodeSet
    M: NodeSet
    B: NodeSet
    interior_qubits: tuple[int, ...]
    boundary_qubits: tuple[int, ...]
    removed_stab_ids: tuple[int, ...]
    boundary_stab_ids: tuple[int, ...]
    measured_basis: str

    @property
    def removed_type(self) -> str:
        return "Z" if self.kind == SMOOTH else "X"

    @property
    def truncated_type(self) -> str:
        return "X" if self.kind == SMOOTH else "Z"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "S": list(self.S),
            "T": list(self.T),
            "N": list(self.N),
            "A": list(self.A),
            "M": list(self.M),
            "B": list(self.B),
            "interior_qubits": list(self.interior_qubits),
            "boundary_qubits": list(self.boundary_qubits),
            "removed_stabilizers": {"type": self.removed_type, "ids": list(self.removed_stab_ids)},
            "boundary_stabilizers": {"type": self.truncated_type, "ids": list(self.boundary_stab_ids)},
            "measured_basis": self.measured_basis,
        }


# transposition symmetry -----------------------------------------------------


def transpose_qubit(code: HgpCode, q: int) -> int:
    kind, a, b = code.qubit_label(q)
    return code.vv(b, a) if kind == "VV" else code.cc(b, a)


def qubit_permutation(code: HgpCode) -> np.ndarray:
    return np.array([transpose_qubit(code, q) for q in range(code.n_qubits)], dtype=np.int64)


def _permute_cols(m: BitMatrix, perm: np.ndarray) -> BitMatrix:
    """Column ``q`` of the result is column ``perm[q]`` of ``m``."""
    return BitMatrix.from_dense(m.to_dense()[:, perm], m.cols)


def _x_row_to_z_row(code: HgpCode, r: int) -> int:
    v, c = code.x_stab_label(r)
    return code.z_stab(c, v)


def _z_row_to_x_row(code: HgpCode, r: int) -> int:
    c, v = code.z_stab_label(r)
    return code.x_stab(v, c)


# sets ---------------------------------------------------------------------------


def _as_nodeset(x, side: str) -> NodeSet:
    if isinstance(x, NodeSet):
        if x.side != side:
            raise ValueError(f"expected a {side}-side set, got {x.side}")
        return x
    return NodeSet(side, x)


def _smooth_sets(code: HgpCode, S, T, N, A, M, B):
    s, t, n_, a, m_, b = (set(x) for x in (S, T, N, A, M, B))
    interior = {code.vv(u, v) for u in b for v in s} | {code.cc(c, c2) for c in t for c2 in a}
    boundary = {code.vv(u, v) for u in m_ - b for v in s} | {
        code.cc(c, c2) for c in t for c2 in n_ - a
    }
    removed = sorted(code.z_stab(c, v) for c in t for v in s)
    bstabs = {code.x_stab(v, c) for v in m_ - b for c in n_} | {
        code.x_stab(v, c) for v in m_ for c in n_ - a
    }
    return sorted(interior), sorted(boundary), removed, sorted(bstabs)


def make_puncture(code: HgpCode, kind: str, S, T, measured_basis: str | None = None) -> PunctureSpec:
    if kind not in (SMOOTH, ROUGH):
        raise ValueError(f"unknown puncture kind {kind!r}")
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    if not len(S) or not len(T):
        raise ValueError("puncture sets S and T must be nonempty")
    g = FactorGraph.from_matrix(code.h)
    N, A, M, B = induced_sets(g, S, T)
    for name, x in (("S", S), ("T", T)):
        if not is_connected(g, x):
            warnings.warn(f"puncture set {name} is not connected", stacklevel=2)
    interior, boundary, removed, bstabs = _smooth_sets(code, S, T, N, A, M, B)
    natural = "X" if kind == SMOOTH else "Z"
    if kind == ROUGH:
        interior = sorted(transpose_qubit(code, q) for q in interior)
        boundary = sorted(transpose_qubit(code, q) for q in boundary)
        removed = sorted(_z_row_to_x_row(code, r) for r in removed)
        bstabs = sorted(_x_row_to_z_row(code, r) for r in bstabs)
    basis = measured_basis or natural
    if basis != natural:
        # the measured Pauli must anticommute with the removed stabilizer type
        raise ValueError(
            f"{kind} puncture removes {'Z' if kind == SMOOTH else 'X'} stabilizers; "
            f"interior must be measured in {natural}, not {basis}"
        )
    return PunctureSpec(
        kind, S, T, N, A, M, B, tuple(interior), tuple(boundary), tuple(removed), tuple(bstabs), basis
    )


def restrict_checks(h: BitMatrix, T) -> BitMatrix:
    """h with every row outside the check set ``T`` zeroed (full shape kept)."""
    return h.mask_rows(_as_nodeset(T, CHECK).members)


def restrict_vars(h: BitMatrix, S) -> BitMatrix:
    """h with every column outside the variable set ``S`` zeroed (full shape kept)."""
    return h.mask_cols(_as_nodeset(S, VAR).members)


# correctability ---------------------------------------------------------------


def codewords_within(h: BitMatrix, support: Iterable[int]) -> int:
    """Dimension of {x in ker h : supp x within ``support``}."""
    cols = sorted(set(support))
    if not cols:
        return 0
    return kernel_basis(h.take_cols(cols)).rows


def dual_codewords_within(h: BitMatrix, support: Iterable[int]) -> int:
    """Dimension of {y in ker h^t : supp y within ``support``}."""
    return codewords_within(transpose(h), support)


@dataclass
class Condition:
    name: str
    dimension: int
    role: str

    @property
    def passed(self) -> bool:
        return self.dimension == 0

    def to_json(self) -> dict:
        return {"name": self.name, "role": self.role, "kernel_dim": self.dimension, "pass": self.passed}


@dataclass
class CorrectabilityReport:
    conditions: list[Condition]
    extra_failures: list[str] = field(default_factory=list)

    def primary(self) -> list[Condition]:
        return [c for c in self.conditions if c.role == "primary"]

    def implied(self) -> list[Condition]:
        return [c for c in self.conditions if c.role == "implied"]

    @property
    def correctable(self) -> bool:
        return not self.extra_failures and all(c.passed for c in self.primary())

    @property
    def consistent(self) -> bool:
        """Primary conditions passing must force every implied one to pass."""
        if not all(c.passed for c in self.primary()):
            return True
        return all(c.passed for c in self.implied())

    def to_json(self) -> dict:
        return {
            "correctable": self.correctable,
            "consistent": self.consistent,
            "conditions": [c.to_json() for c in self.conditions],
            "extra_failures": list(self.extra_failures),
        }


def kernel_conditions(h: BitMatrix, S, T) -> list[Condition]:
    """Kernel-emptiness conditions for the pair (S, T).

    A kernel over a check set Y counts codewords of ker h whose support stays
    on variables all of whose checks lie in Y; a kernel over a variable set X
    counts codewords of ker h^t supported on checks all of whose variables lie
    in X.  Restrictions along the natural side (columns for variables, rows
    for checks) are plain support restrictions.
    """
    g = FactorGraph.from_matrix(h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    N, A, M, B = induced_sets(g, S, T)
    anc_N = ancestor(g, N).members
    anc_M = ancestor(g, M).members
    return [
        Condition("ker h_N", codewords_within(h, anc_N), "primary"),
        Condition("ker h_M^t", dual_codewords_within(h, anc_M), "primary"),
        Condition("ker h_T", codewords_within(h, B.members), "primary"),
        Condition("ker h_S^t", dual_codewords_within(h, A.members), "primary"),
        Condition("ker h_S", codewords_within(h, S.members), "implied"),
        Condition("ker h_T^t", dual_codewords_within(h, T.members), "implied"),
        Condition("ker h_A^t", dual_codewords_within(h, A.members), "implied"),
        Condition("ker h_B", codewords_within(h, B.members), "implied"),
    ]


def check_correctable(code: HgpCode, spec: PunctureSpec) -> CorrectabilityReport:
    return CorrectabilityReport(kernel_conditions(code.h, spec.S, spec.T))


# stabilizers ----------------------------------------------------------------------


def _smooth_hprime(code: HgpCode, S, T, interior_smooth: Iterable[int]):
    hxp = code.hx.mask_cols(interior_smooth)
    rows = [code.z_stab(c, v) for c in T for v in S]
    hzp = code.hz.mask_rows(rows)
    return hxp, hzp


def puncture_stabilizers(code: HgpCode, spec: PunctureSpec) -> tuple[BitMatrix, BitMatrix]:
    """The edge-removal matrices, embedded at full width, for the given puncture."""
    if spec.kind == SMOOTH:
        return _smooth_hprime(code, spec.S, spec.T, spec.interior_qubits)
    perm = qubit_permutation(code)
    interior_smooth = [transpose_qubit(code, q) for q in spec.interior_qubits]
    hxp_s, hzp_s = _smooth_hprime(code, spec.S, spec.T, interior_smooth)
    # the rough X edits are the transposed smooth Z edits, row (v,c) <- row (c,v)
    xrows = [_x_row_to_z_row(code, r) for r in range(code.hx.rows)]
    zrows = [_z_row_to_x_row(code, r) for r in range(code.hz.rows)]
    hxp = _permute_cols(hzp_s.take_rows(xrows), perm)
    hzp = _permute_cols(hxp_s.take_rows(zrows), perm)
    return hxp, hzp


@dataclass
class DeformedCode:
    base: HgpCode
    spec: PunctureSpec | None
    sx: BitMatrix
    sz: BitMatrix
    sx_ids: tuple[int, ...]
    sz_ids: tuple[int, ...]
    dropped_x: tuple[int, ...]
    dropped_z: tuple[int, ...]
    measured_out: dict[int, str]
    new_logical_x: BitMatrix
    new_logical_z: BitMatrix

    @property
    def n_qubits(self) -> int:
        return self.base.n_qubits

    @property
    def live_qubits(self) -> list[int]:
        return [q for q in range(self.n_qubits) if q not in self.measured_out]

    def live(self, m: BitMatrix) -> BitMatrix:
        return m.take_cols(self.live_qubits)

    def logical_count(self) -> int:
        """Logical qubits counted from stabilizer ranks on the live qubits."""
        return len(self.live_qubits) - rank(self.live(self.sx)) - rank(self.live(self.sz))

    def is_valid(self) -> bool:
        if not matmul(self.sx, transpose(self.sz)).is_zero():
            return False
        for q, basis in self.measured_out.items():
            # X stabilizers must avoid Z-measured qubits and vice versa
            other = self.sz if basis == "X" else self.sx
            if other.rows and other.to_dense()[:, q].any():
                return False
        return True


def _drop_zero(m: BitMatrix) -> tuple[BitMatrix, tuple[int, ...], tuple[int, ...]]:
    keep = m.nonzero_rows()
    dropped = tuple(int(i) for i in np.setdiff1d(np.arange(m.rows), keep))
    return m.take_rows(keep), tuple(int(i) for i in keep), dropped


def base_deformed(code: HgpCode) -> DeformedCode:
    """The undeformed code wrapped as a DeformedCode."""
    sx, sxi, dx = _drop_zero(code.hx)
    sz, szi, dz = _drop_zero(code.hz)
    empty = BitMatrix.zeros(0, code.n_qubits)
    return DeformedCode(code, None, sx, sz, sxi, szi, dx, dz, {}, empty, empty)


def apply_puncture(code: HgpCode, spec: PunctureSpec | None, force: bool = False) -> DeformedCode:
    if spec is None:
        return base_deformed(code)
    if not force:
        rep = check_correctable(code, spec)
        if not rep.correctable:
            failed = [c.name for c in rep.primary() if not c.passed]
            raise CorrectabilityError(f"puncture is not correctable: {', '.join(failed)}")
    hxp, hzp = puncture_stabilizers(code, spec)
    sx, sxi, dx = _drop_zero(add(code.hx, hxp))
    sz, szi, dz = _drop_zero(add(code.hz, hzp))
    measured = {q: spec.measured_basis for q in spec.interior_qubits}
    loops = puncture_loop_basis(code, spec)
    chains = puncture_chain_basis(code, spec)
    if spec.kind == SMOOTH:
        lx, lz = chains, loops
    else:
        lx, lz = loops, chains
    out = DeformedCode(code, spec, sx, sz, sxi, szi, dx, dz, measured, lx, lz)
    assert out.is_valid(), "punctured stabilizers do not commute"
    return out


# closed-form defect logicals ------------------------------------------------------


def _embed_small(basis: BitMatrix, idx: list[int], width: int) -> BitMatrix:
    dense = np.zeros((basis.rows, width), dtype=np.uint8)
    if basis.rows and idx:
        dense[:, idx] = basis.to_dense()
    return BitMatrix.from_dense(dense, width)


def _sub(h: BitMatrix, rows: list[int], cols: list[int]) -> BitMatrix:
    d = h.to_dense()
    return BitMatrix.from_dense(d[np.ix_(rows, cols)] if rows and cols else np.zeros((len(rows), len(cols)), np.uint8), len(cols))


def loop_coefficients(h: BitMatrix, S, T):
    """Check-side and variable-side coefficient bases of the loop logicals.

    Returns (Y, X): rows of Y are vectors on T annihilating the columns B of
    h, rows of X are vectors on S annihilated by the rows A of h, both
    embedded at full width (m and n).
    """
    g = FactorGraph.from_matrix(h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    _, A, _, B = induced_sets(g, S, T)
    t, s = list(T), list(S)
    y = left_kernel_basis(_sub(h, t, list(B))) if B.members else BitMatrix.identity(len(t))
    x = kernel_basis(_sub(h, list(A), s)) if A.members else BitMatrix.identity(len(s))
    return _embed_small(y, t, h.rows), _embed_small(x, s, h.cols)


def _smooth_loops(code: HgpCode, S, T) -> BitMatrix:
    y, x = loop_coefficients(code.h, S, T)
    if y.rows == 0 or x.rows == 0:
        return BitMatrix.zeros(0, code.n_qubits)
    # coefficient of Z stabilizer (c, v) is y_c x_v, matching the row index c*n + v
    coeff = kron(y, x)
    rows = [code.z_stab(c, v) for c in T for v in S]
    return matmul(coeff, code.hz.mask_rows(rows))


def _smooth_chain_candidates(code: HgpCode, S, T) -> BitMatrix:
    h = code.h
    g = FactorGraph.from_matrix(h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    N, A, M, B = induced_sets(g, S, T)
    s, t = list(S), list(T)
    b_c = [v for v in range(code.n) if v not in B.as_set()]
    t_c = [c for c in range(code.m) if c not in T.as_set()]
    a_c = [c for c in range(code.m) if c not in A.as_set()]
    s_c = [v for v in range(code.n) if v not in S.as_set()]
    rows: list[np.ndarray] = []
    # VV block: codewords of the checks outside T living off B, times F^S / rs(h[A, S])
    ker_vv = _embed_small(kernel_basis(_sub(h, t_c, b_c)), b_c, code.n)
    quo_vv = _embed_small(quotient_basis(_sub(h, list(A), s)), s, code.n)
    for xr in ker_vv.to_dense():
        for er in quo_vv.to_dense():
            vec = np.zeros(code.n_qubits, np.uint8)
            vec[: code.n * code.n] = np.kron(xr, er)
            rows.append(vec)
    # CC block: F^T / rs(h[T, B]^t) times dual codewords off A for the variables outside S
    quo_cc = _embed_small(quotient_basis(transpose(_sub(h, t, list(B)))), t, code.m)
    ker_cc = _embed_small(left_kernel_basis(_sub(h, a_c, s_c)), a_c, code.m)
    for qr in quo_cc.to_dense():
        for yr in ker_cc.to_dense():
            vec = np.zeros(code.n_qubits, np.uint8)
            vec[code.n * code.n :] = np.kron(qr, yr)
            rows.append(vec)
    if not rows:
        return BitMatrix.zeros(0, code.n_qubits)
    rows.sort(key=lambda r: tuple(np.flatnonzero(r).tolist()))
    return BitMatrix.from_dense(np.vstack(rows), code.n_qubits)


def omega_x_basis(code: HgpCode, S, T) -> BitMatrix:
    """X-type vectors commuting with every original Z stabilizer and avoiding M x S and T x N."""
    g = FactorGraph.from_matrix(code.h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    N, _, M, _ = induced_sets(g, S, T)
    region = {code.vv(u, v) for u in M for v in S} | {code.cc(c, c2) for c in T for c2 in N}
    allowed = [q for q in range(code.n_qubits) if q not in region]
    return _embed_small(kernel_basis(code.hz.take_cols(allowed)), allowed, code.n_qubits)


def _smooth_chains(code: HgpCode, S, T, interior: Iterable[int]) -> BitMatrix:
    cands = _smooth_chain_candidates(code, S, T)
    if cands.rows == 0:
        return cands
    hxp, hzp = _smooth_hprime(code, S, T, interior)
    sx = add(code.hx, hxp)
    single = BitMatrix.from_supports([[q] for q in interior], code.n_qubits)
    seed = vstack([sx, single, omega_x_basis(code, S, T)])
    keep = independent_extension(seed, cands)
    return cands.take_rows(keep)


def puncture_loop_basis(code: HgpCode, spec: PunctureSpec) -> BitMatrix:
    """Loop logicals: Z type for a smooth puncture, X type for a rough one."""
    loops = _smooth_loops(code, spec.S, spec.T)
    if spec.kind == SMOOTH or loops.rows == 0:
        return loops
    return _permute_cols(loops, qubit_permutation(code))


def puncture_chain_basis(code: HgpCode, spec: PunctureSpec) -> BitMatrix:
    """Chain logicals: X type for a smooth puncture, Z type for a rough one."""
    if spec.kind == SMOOTH:
        return _smooth_chains(code, spec.S, spec.T, spec.interior_qubits)
    interior_smooth = [transpose_qubit(code, q) for q in spec.interior_qubits]
    chains = _smooth_chains(code, spec.S, spec.T, interior_smooth)
    if chains.rows == 0:
        return chains
    return _permute_cols(chains, qubit_permutation(code))


def puncture_logical_z_basis(code: HgpCode, spec: PunctureSpec) -> BitMatrix:
    return puncture_loop_basis(code, spec) if spec.kind == SMOOTH else puncture_chain_basis(code, spec)


def puncture_logical_x_basis(code: HgpCode, spec: PunctureSpec) -> BitMatrix:
    return puncture_chain_basis(code, spec) if spec.kind == SMOOTH else puncture_loop_basis(code, spec)


def defect_report(code: HgpCode, spec: PunctureSpec, deformed: DeformedCode | None) -> dict:
    rep = check_correctable(code, spec)
    out = {"spec": spec.to_json(), "correctability": rep.to_json()}
    if deformed is not None:
        out.update(
            {
                "dropped_stabilizers": {"X": list(deformed.dropped_x), "Z": list(deformed.dropped_z)},
                "live_qubits": len(deformed.live_qubits),
                "embedded_k": logical_count(code),
                "defect_logicals": int(deformed.new_logical_z.rows)
                if spec.kind == SMOOTH
                else int(deformed.new_logical_x.rows),
                "stabilizer_logical_count": deformed.logical_count(),
                "logical_x": deformed.new_logical_x.supports(),
                "logical_z": deformed.new_logical_z.supports(),
                "chain_representatives": "greedy rank extension, lexicographic candidate order",
            }
        )
    return out
