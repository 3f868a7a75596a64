"""Code deformation by rounds of commuting Pauli measurements.

A state carries stabilizer generators and symplectic logical pairs.  A round
measures a list of commuting operators one at a time with the usual
stabilizer update; afterwards the new stabilizer group is taken to be the
old generators that commute with the round plus the measured operators.
Products of discarded generators that still commute with the new group are
promoted to logical operators and receive a conjugate partner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .f2core import (
    BitMatrix,
    independent_extension,
    matmul,
    rank,
    row_space_contains,
    solve_left,
    transpose,
    vstack,
)
from .pauli import (
    SymplecticOp,
    _swap_halves,
    commutation_violations,
    ops_matrix,
    symplectic_product,
)

GOOD = "good"
BAD = "bad"


class DeformError(ValueError):
    pass


@dataclass
class StabilizerState:
    n_qubits: int
    stabilizers: list[SymplecticOp]
    logicals: list[tuple[SymplecticOp, SymplecticOp]]
    labels: list[str] = field(default_factory=list)
    errors: list[SymplecticOp] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [GOOD] * len(self.logicals)
        if len(self.labels) != len(self.logicals):
            raise DeformError("one label per logical pair is required")

    @classmethod
    def from_css(cls, hx: BitMatrix, hz: BitMatrix, lx: BitMatrix, lz: BitMatrix) -> StabilizerState:
        n = hx.cols
        stabs = [SymplecticOp.x_type(r) for r in hx.to_dense() if r.any()]
        stabs += [SymplecticOp.z_type(r) for r in hz.to_dense() if r.any()]
        pairs = [
            (SymplecticOp.x_type(a), SymplecticOp.z_type(b))
            for a, b in zip(lx.to_dense(), lz.to_dense())
        ]
        state = cls(n, stabs, pairs)
        state.validate()
        return state

    def logical_ops(self) -> list[SymplecticOp]:
        return [op for pair in self.logicals for op in pair]

    def logical_labels(self) -> list[str]:
        return [lbl for lbl in self.labels for _ in range(2)]

    def stabilizer_matrix(self) -> BitMatrix:
        return ops_matrix(self.stabilizers, self.n_qubits)

    def stabilizer_rank(self) -> int:
        return rank(self.stabilizer_matrix())

    def in_stabilizer_group(self, op: SymplecticOp) -> bool:
        if not self.stabilizers:
            return op.is_identity()
        return row_space_contains(self.stabilizer_matrix(), op.vector())

    def validate(self) -> None:
        bad = commutation_violations(self.stabilizers)
        if bad:
            raise DeformError(f"stabilizers anticommute: {bad[:3]}")
        ops = self.logical_ops()
        for op in ops:
            for s in self.stabilizers:
                if symplectic_product(op, s):
                    raise DeformError("a logical operator anticommutes with a stabilizer")
        for i, a in enumerate(ops):
            for j, b in enumerate(ops):
                want = 1 if (i // 2 == j // 2 and i != j) else 0
                if symplectic_product(a, b) != want:
                    raise DeformError("logical pairs are not in symplectic standard form")
        if self.stabilizer_rank() + len(self.logicals) != self.n_qubits:
            raise DeformError("stabilizers and logicals do not account for every qubit")

    def with_logicals(self, pairs, labels=None) -> StabilizerState:
        out = StabilizerState(self.n_qubits, list(self.stabilizers), list(pairs), list(labels or []), list(self.errors))
        out.validate()
        return out


def partition_by_weight(pairs, threshold: int) -> list[str]:
    """A pair is good when its heavier operator has weight above ``threshold``."""
    return [GOOD if max(a.weight(), b.weight()) > threshold else BAD for a, b in pairs]


@dataclass
class DeformStep:
    measured: list[SymplecticOp]
    record: list[dict]
    q_matrix: BitMatrix
    n_old_logicals: int
    fresh_rows: list[int]
    promoted: list[SymplecticOp]
    non_qubit: list[SymplecticOp]
    demoted: list[SymplecticOp]

    @property
    def logical_block(self) -> BitMatrix:
        return self.q_matrix.take_cols(list(range(self.n_old_logicals)))

    def to_json(self) -> dict:
        return {
            "measured": [m.to_json() for m in self.measured],
            "record": self.record,
            "q_matrix": self.q_matrix.to_dense().tolist(),
            "n_old_logical_ops": self.n_old_logicals,
            "fresh_rows": self.fresh_rows,
            "promoted": [p.to_json() for p in self.promoted],
            "non_qubit": [p.to_json() for p in self.non_qubit],
            "demoted": [p.to_json() for p in self.demoted],
        }


def _span_contains(ops: Sequence[SymplecticOp], op: SymplecticOp, n: int) -> bool:
    if not ops:
        return op.is_identity()
    return row_space_contains(ops_matrix(ops, n), op.vector())


def _reduce_weight(op: SymplecticOp, stabs: Sequence[SymplecticOp]) -> SymplecticOp:
    """Greedy descent: multiply by single generators while the weight drops."""
    improved = True
    while improved:
        improved = False
        for s in stabs:
            cand = op * s
            if cand.weight() < op.weight():
                op = cand
                improved = True
    return op


def find_conjugate(
    n: int,
    target: SymplecticOp,
    stabilizers: Sequence[SymplecticOp],
    must_commute: Sequence[SymplecticOp],
    kind: str | None = None,
) -> SymplecticOp | None:
    """An operator anticommuting with ``target`` and commuting with everything else given.

    ``kind`` restricts the search to pure "X" or pure "Z" operators.
    """
    rows = list(stabilizers) + list(must_commute) + [target]
    rhs = np.zeros(len(rows), np.uint8)
    rhs[-1] = 1
    m = _swap_halves(ops_matrix(rows, n))
    if kind == "X":
        m = m.take_cols(list(range(n)))
    elif kind == "Z":
        m = m.take_cols(list(range(n, 2 * n)))
    x = solve_left(transpose(m), rhs)
    if x is None:
        return None
    if kind == "X":
        op = SymplecticOp.x_type(x)
    elif kind == "Z":
        op = SymplecticOp.z_type(x)
    else:
        op = SymplecticOp.from_vector(x)
    pool = [s for s in stabilizers if kind is None or not (s.z.any() if kind == "X" else s.x.any())]
    return _reduce_weight(op, pool)


def _express(old_basis: BitMatrix | None, op: SymplecticOp, width: int) -> np.ndarray | None:
    if old_basis is None or old_basis.rows == 0:
        return np.zeros(width, np.uint8) if op.is_identity() else None
    return solve_left(old_basis, op.vector())


def measure_round(
    state: StabilizerState, measured: Sequence[SymplecticOp], promote: bool = True
) -> tuple[StabilizerState, DeformStep]:
    n = state.n_qubits
    measured = list(measured)
    if commutation_violations(measured):
        raise DeformError("measured operators must pairwise commute")
    old_stabs = list(state.stabilizers)
    old_logical_ops = state.logical_ops()

    work = list(old_stabs)
    # logical pairs stored as mutable two-element lists, each with a stable id
    pairs = [[a, b] for a, b in state.logicals]
    labels = list(state.labels)
    alive = [True] * len(pairs)
    actions: list[list] = [[[], []] for _ in pairs]
    demoted: list[SymplecticOp] = []
    record: list[dict] = []

    for mi, meas in enumerate(measured):
        anti = [i for i, w in enumerate(work) if symplectic_product(w, meas)]
        if not anti:
            if _span_contains(work, meas, n):
                record.append({"measurement": mi, "case": "already in group"})
                continue
            flat = [(p, s) for p in range(len(pairs)) if alive[p] for s in (0, 1)]
            hits = [(p, s) for p, s in flat if symplectic_product(pairs[p][s], meas)]
            if not hits:
                raise DeformError("logical basis incomplete: measured logical has no partner")
            pe, se = hits[0]
            err = pairs[pe][se]
            for p, s in hits[1:]:
                if p != pe:
                    pairs[p][s] = pairs[p][s] * err
                    actions[p][s].append("times demoted logical")
            alive[pe] = False
            demoted.append(err)
            actions[pe][se].append("demoted to error")
            actions[pe][1 - se].append("absorbed by measurement")
            work.append(meas)
            record.append({"measurement": mi, "case": "logical measured", "pair": pe})
            continue
        piv = anti[0]
        sprime = work[piv]
        for i in anti[1:]:
            work[i] = work[i] * sprime
        touched = []
        for p in range(len(pairs)):
            if not alive[p]:
                continue
            for s in (0, 1):
                if symplectic_product(pairs[p][s], meas):
                    pairs[p][s] = pairs[p][s] * sprime
                    actions[p][s].append(f"times S' (generator {piv})")
                    touched.append([p, s])
        del work[piv]
        work.append(meas)
        record.append(
            {
                "measurement": mi,
                "case": "resolved",
                "s_prime": sprime.to_json(),
                "multiplied_stabilizers": len(anti) - 1,
                "multiplied_logicals": touched,
            }
        )

    surviving = [tuple(pairs[p]) for p in range(len(pairs)) if alive[p]]
    surv_labels = [labels[p] for p in range(len(pairs)) if alive[p]]
    promoted: list[SymplecticOp] = []
    non_qubit: list[SymplecticOp] = []
    if promote:
        kept = [g for g in old_stabs if all(symplectic_product(g, m) == 0 for m in measured)]
        new_gens = _independent(kept + measured, n)
        new_matrix = ops_matrix(new_gens, n)
        kept_set = {g for g in kept}
        extra = [w for w in work if w not in kept_set and w not in set(measured)]
        if extra:
            idx = independent_extension(new_matrix, ops_matrix(extra, n))
            promoted = [extra[i] for i in idx]
            non_qubit = [w for i, w in enumerate(extra) if i not in set(idx)]
        new_pairs = list(surviving)
        conj: list[SymplecticOp] = []
        for i, p in enumerate(promoted):
            others = [op for pair in new_pairs for op in pair] + promoted[:i] + promoted[i + 1 :] + conj
            e = find_conjugate(n, p, new_gens, others)
            if e is None:
                raise DeformError("promoted operator has no conjugate")
            conj.append(e)
        new_pairs += list(zip(promoted, conj))
        new_labels = surv_labels + [GOOD] * len(promoted)
        new_state = StabilizerState(n, new_gens, new_pairs, new_labels, state.errors + demoted)
    else:
        new_state = StabilizerState(n, work, surviving, surv_labels, state.errors + demoted)
    new_state.validate()

    old_basis = ops_matrix(old_logical_ops + old_stabs, n) if (old_logical_ops or old_stabs) else None
    width = len(old_logical_ops) + len(old_stabs)
    rows, fresh = [], []
    for i, op in enumerate(new_state.logical_ops()):
        coeff = _express(old_basis, op, width)
        if coeff is None:
            fresh.append(i)
            coeff = np.zeros(width, np.uint8)
        rows.append(coeff)
    q = BitMatrix.from_dense(np.vstack(rows), width) if rows else BitMatrix.zeros(0, width)
    for p in range(len(pairs)):
        record.append({"logical_pair": p, "actions": actions[p], "alive": alive[p]})
    for p in promoted:
        record.append({"promoted": p.to_json()})
    for p in non_qubit:
        record.append({"non_qubit": p.to_json(), "reason": "already generated by the new group"})
    step = DeformStep(measured, record, q, len(old_logical_ops), fresh, promoted, non_qubit, demoted)
    return new_state, step


def _independent(ops: Sequence[SymplecticOp], n: int) -> list[SymplecticOp]:
    if not ops:
        return []
    idx = independent_extension(BitMatrix.zeros(0, 2 * n), ops_matrix(ops, n))
    return [ops[i] for i in idx]


def release(
    state: StabilizerState, indices: Sequence[int], kind: str | None = None
) -> tuple[StabilizerState, list[SymplecticOp]]:
    """Drop stabilizer generators, turning each independent one into a logical with a conjugate.

    ``kind`` asks for pure X or pure Z conjugates, which exist for CSS states.
    """
    n = state.n_qubits
    gone = [state.stabilizers[i] for i in indices]
    rest = [s for i, s in enumerate(state.stabilizers) if i not in set(indices)]
    rest_matrix = ops_matrix(rest, n)
    idx = independent_extension(rest_matrix, ops_matrix(gone, n)) if gone else []
    promoted = [gone[i] for i in idx]
    pairs = list(state.logicals)
    conj: list[SymplecticOp] = []
    for i, p in enumerate(promoted):
        others = [op for pr in pairs for op in pr] + promoted[:i] + promoted[i + 1 :] + conj
        e = find_conjugate(n, p, rest, others, kind)
        if e is None:
            raise DeformError("released generator has no conjugate of the requested type")
        conj.append(e)
    out = StabilizerState(n, rest, pairs + list(zip(promoted, conj)), state.labels + [GOOD] * len(promoted), list(state.errors))
    out.validate()
    return out, promoted


def compose(steps: Sequence[DeformStep]) -> BitMatrix:
    """Product of the logical blocks, latest step on the left."""
    if not steps:
        raise DeformError("nothing to compose")
    q = steps[0].logical_block
    for st in steps[1:]:
        blk = st.logical_block
        if blk.cols != q.rows:
            raise DeformError(f"dimension mismatch: {blk.shape} after {q.shape}")
        q = matmul(blk, q)
    return q


def check_nonmixing(q: BitMatrix, row_labels: Sequence[str], col_labels: Sequence[str] | None = None) -> dict:
    """Block structure of ``q`` with respect to good/bad labels of rows and logical columns."""
    col_labels = list(row_labels if col_labels is None else col_labels)
    row_labels = list(row_labels)
    if len(row_labels) != q.rows or len(col_labels) > q.cols:
        raise DeformError("labels do not match the matrix shape")
    d = q.to_dense()[:, : len(col_labels)]
    rg = np.array([lbl == GOOD for lbl in row_labels])
    cg = np.array([lbl == GOOD for lbl in col_labels])
    off = d[np.ix_(rg, ~cg)].any() or d[np.ix_(~rg, cg)].any()
    good = d[np.ix_(rg, cg)]
    small = bool(good.size and rank(BitMatrix.from_dense(good)) == int(rg.sum())) if rg.any() else True
    return {"nonmixing": not bool(off), "small": small}
