"""Wormholes: a smooth puncture on T x S joined to a rough puncture on S x T.

Boundary qubits of the two punctures are paired by transposition and
measured as ``X (rough side) Z (smooth side)``.  Boundary stabilizers that
these measurements frustrate are replaced by hybrids built from an X
stabilizer and its transposed Z stabilizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .defect import (
    Condition,
    SMOOTH,
    ROUGH,
    _as_nodeset,
    _embed_small,
    _smooth_chains,
    _smooth_loops,
    _sub,
    codewords_within,
    dual_codewords_within,
    kernel_conditions,
    make_puncture,
    transpose_qubit,
)
from .f2core import (
    BitMatrix,
    kernel_basis,
    left_kernel_basis,
    rank,
    solve_left,
    vstack,
)
from .fgraph import CHECK, VAR, FactorGraph, ancestor, induced_sets, neighborhood
from .hgp import HgpCode, logical_count
from .pauli import (
    SymplecticOp,
    commutation_violations,
    ops_matrix,
    symplectic_product,
)


class WormholeError(ValueError):
    """The requested wormhole is not admissible."""


@dataclass
class ExtendedReport:
    disjoint: bool
    conditions: list[Condition] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.disjoint and all(c.passed for c in self.conditions if c.role == "primary")

    def to_json(self) -> dict:
        return {
            "disjoint": self.disjoint,
            "pass": self.passed,
            "conditions": [c.to_json() for c in self.conditions],
        }


def check_extended_correctable(code: HgpCode, S, T) -> ExtendedReport:
    g = FactorGraph.from_matrix(code.h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    N, A, M, B = induced_sets(g, S, T)
    disjoint = not (N.as_set() & T.as_set()) and not (M.as_set() & S.as_set())
    if not disjoint:
        return ExtendedReport(False)
    conds = kernel_conditions(code.h, S, T)
    # the same conditions for the enlarged pair (M, N)
    for c in kernel_conditions(code.h, M, N):
        conds.append(Condition(c.name.replace("h_", "h~_"), c.dimension, c.role))
    return ExtendedReport(True, conds)


@dataclass
class WormholeSpec:
    S: tuple[int, ...]
    T: tuple[int, ...]
    N: tuple[int, ...]
    A: tuple[int, ...]
    M: tuple[int, ...]
    B: tuple[int, ...]
    smooth_interior: tuple[int, ...]
    rough_interior: tuple[int, ...]
    measurements: list[tuple[int, int]]
    hybrids: list[SymplecticOp]
    hybrid_labels: list[tuple[int, int]]
    retained_x: tuple[int, ...]
    retained_z: tuple[int, ...]

    @property
    def interior(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.smooth_interior) | set(self.rough_interior)))


def make_wormhole_spec(code: HgpCode, S, T) -> WormholeSpec:
    g = FactorGraph.from_matrix(code.h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    if not len(S) or not len(T):
        raise WormholeError("S and T must be nonempty")
    N, A, M, B = induced_sets(g, S, T)
    if N.as_set() & T.as_set() or M.as_set() & S.as_set():
        raise WormholeError("induced neighbourhoods overlap (need N∩T = M∩S = ∅)")
    smooth = make_puncture(code, SMOOTH, S, T)
    rough = make_puncture(code, ROUGH, S, T)
    spec = WormholeSpec(
        tuple(S), tuple(T), tuple(N), tuple(A), tuple(M), tuple(B),
        smooth.interior_qubits, rough.interior_qubits, [], [], [], (), (),
    )
    spec.measurements = two_qubit_measurements(code, spec)
    spec.hybrids, spec.hybrid_labels = _hybrids(code, spec)
    sx, tx = set(S), set(T)
    m_, n_ = set(M), set(N)
    spec.retained_x = tuple(
        code.x_stab(v, c)
        for v in range(code.n)
        for c in range(code.m)
        if not ((v in sx and c in tx) or (v in m_ and c in n_))
    )
    spec.retained_z = tuple(
        code.z_stab(c, v)
        for c in range(code.m)
        for v in range(code.n)
        if not ((c in tx and v in sx) or (c in n_ and v in m_))
    )
    return spec


def two_qubit_measurements(code: HgpCode, spec: WormholeSpec) -> list[tuple[int, int]]:
    """Pairs (x_qubit, z_qubit): X on the rough boundary, Z on the transposed smooth boundary."""
    n_minus_a = [c for c in spec.N if c not in set(spec.A)]
    m_minus_b = [v for v in spec.M if v not in set(spec.B)]
    pairs = [(code.cc(c, c2), code.cc(c2, c)) for c in n_minus_a for c2 in spec.T]
    pairs += [(code.vv(u, u2), code.vv(u2, u)) for u in spec.S for u2 in m_minus_b]
    return pairs


def measurement_ops(code: HgpCode, spec: WormholeSpec) -> list[SymplecticOp]:
    return [SymplecticOp.from_supports(code.n_qubits, [x], [z]) for x, z in spec.measurements]


def _hybrids(code: HgpCode, spec: WormholeSpec):
    interior = np.zeros(code.n_qubits, dtype=bool)
    interior[list(spec.interior)] = True
    ops, labels = [], []
    b, a = set(spec.B), set(spec.A)
    hx = code.hx.to_dense()
    hz = code.hz.to_dense()
    for v in spec.M:
        for c in spec.N:
            if v in b and c in a:
                continue
            x = hx[code.x_stab(v, c)].copy()
            z = hz[code.z_stab(c, v)].copy()
            x[interior] = 0
            z[interior] = 0
            ops.append(SymplecticOp(x, z))
            labels.append((v, c))
    return ops, labels


def hybrid_stabilizers(code: HgpCode, spec: WormholeSpec) -> list[SymplecticOp]:
    return list(spec.hybrids)


@dataclass
class WormholeCode:
    base: HgpCode
    spec: WormholeSpec
    generators: list[SymplecticOp]
    blocks: dict[str, tuple[int, int]]
    measured_out: dict[int, str]

    @property
    def live_qubits(self) -> list[int]:
        return [q for q in range(self.base.n_qubits) if q not in self.measured_out]

    def generator_matrix(self, live_only: bool = True) -> BitMatrix:
        m = ops_matrix(self.generators, self.base.n_qubits)
        if not live_only:
            return m
        nq = self.base.n_qubits
        live = self.live_qubits
        return m.take_cols(live + [nq + q for q in live])

    def logical_count(self) -> int:
        return len(self.live_qubits) - rank(self.generator_matrix())

    def max_weight(self) -> int:
        return max((g.weight() for g in self.generators), default=0)


def apply_wormhole(code: HgpCode, S, T, force: bool = False) -> WormholeCode:
    if not force:
        rep = check_extended_correctable(code, S, T)
        if not rep.disjoint:
            raise WormholeError("induced neighbourhoods overlap (need N∩T = M∩S = ∅)")
        if not rep.passed:
            failed = [c.name for c in rep.conditions if c.role == "primary" and not c.passed]
            raise WormholeError(f"extended correctability fails: {', '.join(failed)}")
    spec = make_wormhole_spec(code, S, T)
    n = code.n_qubits
    hx = code.hx.to_dense()
    hz = code.hz.to_dense()
    interior = list(spec.interior)
    gens: list[SymplecticOp] = []
    blocks: dict[str, tuple[int, int]] = {}
    start = 0
    for r in spec.retained_x:
        row = hx[r]
        assert not row[interior].any(), "retained X stabilizer touches a puncture interior"
        gens.append(SymplecticOp.x_type(row))
    blocks["X"] = (start, len(gens))
    start = len(gens)
    for r in spec.retained_z:
        row = hz[r]
        assert not row[interior].any(), "retained Z stabilizer touches a puncture interior"
        gens.append(SymplecticOp.z_type(row))
    blocks["Z"] = (start, len(gens))
    start = len(gens)
    gens.extend(spec.hybrids)
    blocks["hybrid"] = (start, len(gens))
    start = len(gens)
    gens.extend(measurement_ops(code, spec))
    blocks["measurement"] = (start, len(gens))
    measured = {q: "X" for q in spec.smooth_interior}
    measured.update({q: "Z" for q in spec.rough_interior})
    out = WormholeCode(code, spec, gens, blocks, measured)
    bad = commutation_violations(gens)
    assert not bad, f"wormhole generators fail to commute: {bad[:5]}"
    return out


# logicals ----------------------------------------------------------------------


def transpose_op(code: HgpCode, op: SymplecticOp) -> SymplecticOp:
    """Relabel qubits by transposition and swap X with Z."""
    perm = np.array([transpose_qubit(code, q) for q in range(code.n_qubits)])
    return SymplecticOp(op.z[perm], op.x[perm])


def type2_coefficients(h: BitMatrix, S, T):
    """Rows g on N killed by h^t on S, and rows f on M killed by h on T (full width)."""
    g = FactorGraph.from_matrix(h)
    S = _as_nodeset(S, VAR)
    T = _as_nodeset(T, CHECK)
    N, _, M, _ = induced_sets(g, S, T)
    gg = left_kernel_basis(_sub(h, list(N), list(S)))
    ff = kernel_basis(_sub(h, list(T), list(M)))
    return _embed_small(gg, list(N), h.rows), _embed_small(ff, list(M), h.cols)


def _type2_loops(code: HgpCode, spec: WormholeSpec) -> list[SymplecticOp]:
    gg, ff = type2_coefficients(code.h, spec.S, spec.T)
    rows = [code.z_stab(c, v) for c in spec.N for v in spec.M]
    hz = code.hz.mask_rows(rows).to_dense()
    out = []
    for g in gg.to_dense():
        for f in ff.to_dense():
            coeff = np.kron(g, f)
            vec = (coeff.astype(np.int64) @ hz.astype(np.int64)) & 1
            out.append(SymplecticOp.z_type(vec.astype(np.uint8)))
    return out


@dataclass
class WormholeLogicals:
    type1_loops: list[SymplecticOp]
    type1_x_partners: list[SymplecticOp]
    type1_witnesses: list[np.ndarray | None]
    type2_loops: list[SymplecticOp]
    type2_x_partners: list[SymplecticOp]
    type2_witnesses: list[np.ndarray | None]
    chain_conjugates: list[SymplecticOp]
    pairing: str = "chains paired with loops by inverting the loop/chain pairing matrix"

    @property
    def count(self) -> int:
        return len(self.type1_loops) + len(self.type2_loops)


def _mapping_witness(code: HgpCode, wh: WormholeCode, z_loop: SymplecticOp, x_loop: SymplecticOp):
    lo, hi = wh.blocks["hybrid"][0], wh.blocks["measurement"][1]
    rows = wh.generators[lo:hi]
    if not rows:
        return None
    return solve_left(ops_matrix(rows), (z_loop * x_loop).vector())


def wormhole_logical_operators(code: HgpCode, wh: WormholeCode) -> WormholeLogicals:
    spec = wh.spec
    t1 = [SymplecticOp.z_type(r) for r in _smooth_loops(code, spec.S, spec.T).to_dense()]
    t1x = [transpose_op(code, op) for op in t1]
    t1w = [_mapping_witness(code, wh, a, b) for a, b in zip(t1, t1x)]
    t2 = _type2_loops(code, spec)
    t2x = [transpose_op(code, op) for op in t2]
    t2w = [_mapping_witness(code, wh, a, b) for a, b in zip(t2, t2x)]
    chains = [
        SymplecticOp.x_type(r)
        for r in _smooth_chains(code, spec.S, spec.T, spec.smooth_interior).to_dense()
    ]
    products = [c * transpose_op(code, c) for c in chains]
    conj = _pair_with(t1, products)
    return WormholeLogicals(t1, t1x, t1w, t2, t2x, t2w, conj)


def _pair_with(loops: list[SymplecticOp], cands: list[SymplecticOp]) -> list[SymplecticOp]:
    """Recombine ``cands`` so that candidate i pairs with loop i only."""
    if not loops or len(cands) != len(loops):
        return list(cands)
    gram = np.array([[symplectic_product(c, l) for l in loops] for c in cands], dtype=np.uint8)
    gm = BitMatrix.from_dense(gram)
    if rank(gm) < len(loops):
        return list(cands)
    out = []
    cm = ops_matrix(cands)
    for i in range(len(loops)):
        e = np.zeros(len(loops), np.uint8)
        e[i] = 1
        w = solve_left(gm, e)
        vec = (w.astype(np.int64) @ cm.to_dense().astype(np.int64)) & 1
        out.append(SymplecticOp.from_vector(vec.astype(np.uint8)))
    return out


def wormhole_report(code: HgpCode, wh: WormholeCode, logicals: WormholeLogicals) -> dict:
    spec = wh.spec
    return {
        "S": list(spec.S),
        "T": list(spec.T),
        "N": list(spec.N),
        "A": list(spec.A),
        "M": list(spec.M),
        "B": list(spec.B),
        "measurements": [list(p) for p in spec.measurements],
        "hybrids": [
            {"label": list(lbl), **op.to_json()} for lbl, op in zip(spec.hybrid_labels, spec.hybrids)
        ],
        "live_qubits": len(wh.live_qubits),
        "embedded_k": logical_count(code),
        "type1_loops": [op.to_json() for op in logicals.type1_loops],
        "type2_loops": [op.to_json() for op in logicals.type2_loops],
        "chain_conjugates": [op.to_json() for op in logicals.chain_conjugates],
        "stabilizer_logical_count": wh.logical_count(),
        "max_generator_weight": wh.max_weight(),
        "pairing": logicals.pairing,
    }
