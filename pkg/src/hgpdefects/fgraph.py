"""Bipartite factor graphs, neighbourhoods, ancestors and induced sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .f2core import BitMatrix

VAR = "var"
CHECK = "check"


class AlistError(ValueError):
    """Malformed alist text."""


class AlistHeaderError(AlistError):
    pass


class AlistIndexError(AlistError):
    pass


class AlistDegreeError(AlistError):
    pass


@dataclass(frozen=True)
class NodeSet:
    side: str
    members: tuple[int, ...]

    def __init__(self, side: str, members: Iterable[int] = ()):
        if side not in (VAR, CHECK):
            raise ValueError(f"unknown side {side!r}")
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "members", tuple(sorted(set(int(x) for x in members))))

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: object) -> bool:
        return x in set(self.members)

    def as_set(self) -> frozenset[int]:
        return frozenset(self.members)


def variables(members: Iterable[int] = ()) -> NodeSet:
    return NodeSet(VAR, members)


def checks(members: Iterable[int] = ()) -> NodeSet:
    return NodeSet(CHECK, members)


class FactorGraph:
    """Variable/check bipartite graph equivalent to a parity-check matrix."""

    def __init__(self, n_vars: int, n_checks: int, adjacency: Iterable[Iterable[int]]):
        adj = tuple(tuple(sorted(set(int(v) for v in row))) for row in adjacency)
        if len(adj) != n_checks:
            raise ValueError(f"expected {n_checks} check rows, got {len(adj)}")
        for row in adj:
            for v in row:
                if not 0 <= v < n_vars:
                    raise IndexError(f"variable {v} out of range")
        self.n_vars = n_vars
        self.n_checks = n_checks
        self.check_nbrs = adj
        var_nbrs: list[list[int]] = [[] for _ in range(n_vars)]
        for c, row in enumerate(adj):
            for v in row:
                var_nbrs[v].append(c)
        self.var_nbrs = tuple(tuple(x) for x in var_nbrs)

    @classmethod
    def from_matrix(cls, h: BitMatrix) -> FactorGraph:
        return cls(h.cols, h.rows, h.supports())

    def to_matrix(self) -> BitMatrix:
        return BitMatrix.from_supports(self.check_nbrs, self.n_vars)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactorGraph):
            return NotImplemented
        return (self.n_vars, self.n_checks, self.check_nbrs) == (
            other.n_vars,
            other.n_checks,
            other.check_nbrs,
        )

    def size(self, side: str) -> int:
        return self.n_vars if side == VAR else self.n_checks

    def nbrs(self, side: str, i: int) -> tuple[int, ...]:
        return self.var_nbrs[i] if side == VAR else self.check_nbrs[i]

    def _validate(self, s: NodeSet) -> None:
        n = self.size(s.side)
        for x in s.members:
            if not 0 <= x < n:
                raise IndexError(f"{s.side} index {x} out of range [0, {n})")


def _other(side: str) -> str:
    return CHECK if side == VAR else VAR


def neighborhood(g: FactorGraph, s: NodeSet) -> NodeSet:
    g._validate(s)
    out: set[int] = set()
    for x in s.members:
        out.update(g.nbrs(s.side, x))
    return NodeSet(_other(s.side), out)


def ancestor(g: FactorGraph, s: NodeSet) -> NodeSet:
    """Opposite-side nodes whose whole neighbourhood lies inside ``s``."""
    g._validate(s)
    inside = s.as_set()
    side = _other(s.side)
    return NodeSet(side, [y for y in range(g.size(side)) if set(g.nbrs(side, y)) <= inside])


def induced_sets(g: FactorGraph, S: NodeSet, T: NodeSet):
    """Return (N, A, M, B) = (Γ(S), Γ⁻¹(S), Γ(T), Γ⁻¹(T))."""
    if S.side != VAR or T.side != CHECK:
        raise ValueError("S must be variable-side and T check-side")
    N, A = neighborhood(g, S), ancestor(g, S)
    M, B = neighborhood(g, T), ancestor(g, T)
    assert neighborhood(g, A).as_set() <= S.as_set()
    assert neighborhood(g, B).as_set() <= T.as_set()
    return N, A, M, B


def is_connected(g: FactorGraph, s: NodeSet) -> bool:
    """Members are adjacent when they share a neighbour; test that they form one component."""
    g._validate(s)
    members = list(s.members)
    if len(members) <= 1:
        return True
    inside = s.as_set()
    seen = {members[0]}
    stack = [members[0]]
    other = _other(s.side)
    while stack:
        x = stack.pop()
        for y in g.nbrs(s.side, x):
            for z in g.nbrs(other, y):
                if z in inside and z not in seen:
                    seen.add(z)
                    stack.append(z)
    return len(seen) == len(members)


# alist ---------------------------------------------------------------------


def to_alist(g: FactorGraph) -> str:
    col_deg = [len(x) for x in g.var_nbrs]
    row_deg = [len(x) for x in g.check_nbrs]
    max_col = max(col_deg, default=0)
    max_row = max(row_deg, default=0)
    lines = [f"{g.n_vars} {g.n_checks}", f"{max_col} {max_row}"]
    lines.append(" ".join(map(str, col_deg)))
    lines.append(" ".join(map(str, row_deg)))
    # zero padding; a lone 0 keeps lists of isolated nodes from being blank
    for nb in g.var_nbrs:
        entries = [c + 1 for c in nb] + [0] * (max(max_col, 1) - len(nb))
        lines.append(" ".join(map(str, entries)))
    for nb in g.check_nbrs:
        entries = [v + 1 for v in nb] + [0] * (max(max_row, 1) - len(nb))
        lines.append(" ".join(map(str, entries)))
    return "\n".join(lines) + "\n"


def _ints(line: str, what: str) -> list[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError as exc:
        raise AlistHeaderError(f"non-integer token in {what}") from exc


def from_alist(text: str) -> FactorGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise AlistHeaderError("missing header line 'n m'")
    head = _ints(lines[0], "header")
    if len(head) != 2 or min(head) < 0:
        raise AlistHeaderError("header must be 'n m'")
    n, m = head
    if len(lines) < 2:
        raise AlistHeaderError("missing max-degree line")
    if len(_ints(lines[1], "max degrees")) != 2:
        raise AlistHeaderError("max-degree line must hold two integers")
    if len(lines) < 4:
        raise AlistHeaderError("missing column/row degree lines")
    col_deg = _ints(lines[2], "column degrees")
    row_deg = _ints(lines[3], "row degrees")
    if len(col_deg) != n or len(row_deg) != m:
        raise AlistDegreeError("degree line lengths disagree with header")
    body = lines[4:]
    if len(body) < n:
        raise AlistHeaderError(f"missing column neighbour lists ({len(body)} of {n})")
    if len(body) < n + m:
        raise AlistHeaderError(f"missing row neighbour lists ({len(body) - n} of {m})")
    var_lists: list[list[int]] = []
    for v in range(n):
        entries = [x for x in _ints(body[v], "column list") if x != 0]
        for x in entries:
            if not 1 <= x <= m:
                raise AlistIndexError(f"check index {x} out of range in column {v + 1}")
        if len(entries) != col_deg[v]:
            raise AlistDegreeError(f"column {v + 1} degree mismatch")
        var_lists.append([x - 1 for x in entries])
    rows: list[list[int]] = []
    for c in range(m):
        entries = [x for x in _ints(body[n + c], "row list") if x != 0]
        for x in entries:
            if not 1 <= x <= n:
                raise AlistIndexError(f"variable index {x} out of range in row {c + 1}")
        if len(entries) != row_deg[c]:
            raise AlistDegreeError(f"row {c + 1} degree mismatch")
        rows.append([x - 1 for x in entries])
    g = FactorGraph(n, m, rows)
    if [sorted(x) for x in var_lists] != [list(x) for x in g.var_nbrs]:
        raise AlistDegreeError("column and row lists describe different graphs")
    return g


def repetition_code(n: int) -> BitMatrix:
    """(n-1) x n parity checks of the length-n repetition code."""
    dense = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        dense[i, i] = dense[i, i + 1] = 1
    return BitMatrix.from_dense(dense, n)
