"""Point-like puncture movement and traceability of logical operators."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .deform import StabilizerState, measure_round, release
from .f2core import BitMatrix, left_kernel_basis, matmul, rank, vstack
from .hgp import HgpCode, embedded_logical_pairs
from .pauli import SymplecticOp, ops_matrix, symplectic_gram


class TraceError(ValueError):
    pass


@dataclass
class LogicalGraph:
    """Multigraph with stabilizers as vertices and support qubits as edges.

    Vertices below ``n_stabilizers`` are stabilizer row ids.  A support qubit
    touched by a single stabilizer is attached to its own boundary vertex,
    numbered from ``n_stabilizers`` upward.
    """

    vertices: list[int]
    edges: list[tuple[int, int]]
    edge_qubits: list[int]
    n_stabilizers: int = 0
    stabilizer_type: str = ""

    def degrees(self) -> dict[int, int]:
        deg: dict[int, int] = defaultdict(int)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return dict(deg)

    def boundary_vertices(self) -> list[int]:
        return [v for v in self.vertices if v >= self.n_stabilizers]

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices,
            "edges": [list(e) for e in self.edges],
            "edge_qubits": self.edge_qubits,
            "n_stabilizers": self.n_stabilizers,
            "stabilizer_type": self.stabilizer_type,
        }


def build_logical_graph(code: HgpCode, q: SymplecticOp) -> LogicalGraph:
    if q.has_y():
        raise TraceError("operator has Y support; only pure X or pure Z operators can be traced")
    if q.x.any() and q.z.any():
        raise TraceError("operator mixes X and Z parts")
    if q.is_identity():
        return LogicalGraph([], [], [], 0, "")
    # an X-type operator is dragged by a Z-type puncture and vice versa
    if q.x.any():
        stabs, support, kind = code.hz, np.flatnonzero(q.x), "Z"
    else:
        stabs, support, kind = code.hx, np.flatnonzero(q.z), "X"
    dense = stabs.to_dense()
    r = stabs.rows
    edges, qubits, verts = [], [], set()
    next_boundary = r
    for qb in support.tolist():
        inc = np.flatnonzero(dense[:, qb]).tolist()
        if len(inc) > 2:
            raise TraceError(f"qubit {qb} meets {len(inc)} stabilizers; G_Q is a graph only for degree at most 2")
        if len(inc) == 1:
            inc.append(next_boundary)
            next_boundary += 1
        elif not inc:
            inc = [next_boundary, next_boundary + 1]
            next_boundary += 2
        edges.append((inc[0], inc[1]))
        qubits.append(qb)
        verts.update(inc)
    return LogicalGraph(sorted(verts), edges, qubits, r, kind)


def _adjacency(edges: Sequence[tuple[int, int]]):
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for i, (a, b) in enumerate(edges):
        adj[a].append((b, i))
        if a != b:
            adj[b].append((a, i))
    for v in adj:
        adj[v].sort()
    return adj


def _connected(edges: Sequence[tuple[int, int]]) -> bool:
    if not edges:
        return True
    adj = _adjacency(edges)
    start = edges[0][0]
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w, _ in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return all(a in seen for a, _ in edges)


def _hierholzer(edges: Sequence[tuple[int, int]], start: int) -> list[int]:
    adj = _adjacency(edges)
    ptr = defaultdict(int)
    used = [False] * len(edges)
    stack: list[tuple[int, int | None]] = [(start, None)]
    out: list[int] = []
    while stack:
        v, via = stack[-1]
        lst = adj[v]
        while ptr[v] < len(lst) and used[lst[ptr[v]][1]]:
            ptr[v] += 1
        if ptr[v] == len(lst):
            stack.pop()
            if via is not None:
                out.append(via)
        else:
            w, e = lst[ptr[v]]
            used[e] = True
            stack.append((w, e))
    out.reverse()
    return out


def _edges_of(g) -> list[tuple[int, int]]:
    return list(g.edges) if isinstance(g, LogicalGraph) else list(g)


def eulerian_traceable(g: LogicalGraph | Sequence[tuple[int, int]]) -> dict:
    """Closed Eulerian walk through every edge, as a list of edge indices."""
    edges = _edges_of(g)
    if not edges:
        return {"traceable": True, "cycle": []}
    deg: dict[int, int] = defaultdict(int)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    if any(d % 2 for d in deg.values()) or not _connected(edges):
        return {"traceable": False, "cycle": None}
    return {"traceable": True, "cycle": _hierholzer(edges, min(deg))}


def eulerian_trail(g: LogicalGraph | Sequence[tuple[int, int]]) -> dict:
    """Open trail between the two odd vertices, reported separately from cycles."""
    edges = _edges_of(g)
    deg: dict[int, int] = defaultdict(int)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    odd = sorted(v for v, d in deg.items() if d % 2)
    if len(odd) != 2 or not _connected(edges):
        return {"open_trail": False, "trail": None}
    return {"open_trail": True, "trail": _hierholzer(edges, odd[0]), "ends": odd}


def is_closed_walk(edges: Sequence[tuple[int, int]], order: Sequence[int]) -> bool:
    """True when ``order`` uses every edge once and returns to its start."""
    if sorted(order) != list(range(len(edges))):
        return False
    if not order:
        return True
    a, b = edges[order[0]]
    for start, cur in ((a, b), (b, a)):
        ok = True
        for e in order[1:]:
            x, y = edges[e]
            if x == cur:
                cur = y
            elif y == cur:
                cur = x
            else:
                ok = False
                break
        if ok and cur == start:
            return True
    return False


# point-like puncture movement ------------------------------------------------


@dataclass
class MoveStep:
    position: tuple[int, int]
    qubit: int
    beta_support: list[int]
    frustrated: list[int]
    paired_with_puncture: bool
    matches_rederivation: bool

    def to_json(self) -> dict:
        return {
            "position": list(self.position),
            "qubit": self.qubit,
            "beta_support": self.beta_support,
            "frustrated": self.frustrated,
            "paired_with_puncture": self.paired_with_puncture,
            "matches_rederivation": self.matches_rederivation,
        }


@dataclass
class MoveTranscript:
    path: list[tuple[int, int]]
    steps: list[MoveStep] = field(default_factory=list)
    beta: SymplecticOp | None = None
    restored: bool | None = None
    encodes_qubit: bool = True
    final_state: StabilizerState | None = None

    def max_frustrated(self) -> int:
        return max((len(s.frustrated) for s in self.steps), default=0)

    def to_json(self) -> dict:
        return {
            "path": [list(p) for p in self.path],
            "steps": [s.to_json() for s in self.steps],
            "beta_support": self.beta.support() if self.beta is not None else [],
            "restored": self.restored,
            "encodes_qubit": self.encodes_qubit,
            "max_frustrated": self.max_frustrated(),
        }


def connecting_qubit(code: HgpCode, a: tuple[int, int], b: tuple[int, int]) -> int:
    """The unique qubit shared by Z stabilizers ``a`` and ``b`` (each given as (check, variable))."""
    ra = code.hz.to_dense()[code.z_stab(*a)]
    rb = code.hz.to_dense()[code.z_stab(*b)]
    common = np.flatnonzero(ra & rb).tolist()
    if len(common) != 1 or a == b:
        raise TraceError(f"stabilizers {a} and {b} do not share exactly one qubit")
    return common[0]


def rederive_round(gens: BitMatrix, measured: BitMatrix) -> BitMatrix:
    """Stabilizer group after measuring commuting ``measured``: old elements commuting with all of it, plus it."""
    g = symplectic_gram(gens, measured)
    keep = left_kernel_basis(g)
    parts = [matmul(keep, gens)] if keep.rows else []
    return vstack(parts + [measured])


def same_span(a: BitMatrix, b: BitMatrix) -> bool:
    ra, rb = rank(a), rank(b)
    return ra == rb == rank(vstack([a, b]))


def _front(state: StabilizerState, op: SymplecticOp) -> StabilizerState:
    """Reorder generators so ``op`` resolves the next growth measurement."""
    if op not in state.stabilizers:
        return state
    i = state.stabilizers.index(op)
    order = [state.stabilizers[i]] + state.stabilizers[:i] + state.stabilizers[i + 1 :]
    return StabilizerState(state.n_qubits, order, list(state.logicals), list(state.labels), list(state.errors))


def move_point_puncture(code: HgpCode, path: Sequence[tuple[int, int]]) -> MoveTranscript:
    """Drag a single removed Z stabilizer along ``path`` by alternating X and Z measurements."""
    path = [tuple(int(v) for v in p) for p in path]
    tr = MoveTranscript(path)
    n = code.n_qubits
    if not path:
        tr.beta = SymplecticOp.identity(n)
        return tr
    for a, b in zip(path, path[1:]):
        connecting_qubit(code, a, b)
    lx, lz = embedded_logical_pairs(code)
    state = StabilizerState.from_css(code.hx, code.hz, lx, lz)
    nx = sum(1 for r in code.hx.to_dense() if r.any())
    zrows = [i for i, r in enumerate(code.hz.to_dense()) if r.any()]
    zdense = code.hz.to_dense()
    start = code.z_stab(*path[0])
    if not zdense[start].any():
        raise TraceError("path starts on an empty stabilizer")
    state, promoted = release(state, [nx + zrows.index(start)], kind="X")
    # with redundant checks the removed stabilizer is still generated and stores no qubit
    tr.encodes_qubit = bool(promoted)
    partner = state.logicals[-1][1] if promoted else None
    base_z = {r: SymplecticOp.z_type(zdense[r]) for r in zrows}
    beta = SymplecticOp.identity(n)
    check = state.stabilizer_matrix()
    for a, b in zip(path, path[1:]):
        q = connecting_qubit(code, a, b)
        xq = SymplecticOp.from_supports(n, [q])
        za = base_z[code.z_stab(*a)]
        state = _front(state, base_z[code.z_stab(*b)])
        state, _ = measure_round(state, [xq], promote=False)
        check = rederive_round(check, ops_matrix([xq], n))
        state, _ = measure_round(state, [za], promote=False)
        check = rederive_round(check, ops_matrix([za], n))
        beta = beta * xq
        here = code.z_stab(*b)
        frustrated = [r for r in zrows if r != here and not state.in_stabilizer_group(base_z[r])]
        # each frustrated stabilizer survives only as a product with the puncture
        paired = all(state.in_stabilizer_group(base_z[r] * base_z[here]) for r in frustrated)
        tr.steps.append(
            MoveStep(b, q, beta.support(), frustrated, paired, same_span(check, state.stabilizer_matrix()))
        )
    tr.beta = beta
    if path[0] == path[-1]:
        tr.restored = not tr.steps[-1].frustrated if tr.steps else True
    tr.final_state = state
    # the partner logical picks up every crossed qubit
    if partner is not None and state.logicals[-1][1] != partner * beta:
        raise TraceError("tracked conjugate logical disagrees with the accumulated string")
    return tr
